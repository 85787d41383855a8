#pragma once

// Umbrella header.

#include "qhm/classify.hpp"
#include "qhm/embed.hpp"
#include "qhm/energy.hpp"
#include "qhm/error.hpp"
#include "qhm/io.hpp"
#include "qhm/linalg.hpp"
#include "qhm/mconstant.hpp"
#include "qhm/metric_space.hpp"
#include "qhm/optim.hpp"
#include "qhm/report.hpp"
#include "qhm/spaces.hpp"
#include "qhm/tolerances.hpp"
