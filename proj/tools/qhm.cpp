// qhm: command-line front end for the quasihypermetric toolkit.
//
//   qhm validate <file> [--format csv|json]
//   qhm classify|m|mplus|embed|report <file>... [--fixture NAME] [--tol.KEY=V]
//   qhm approx '<descriptor json>' --max-n N --seed S
//   qhm gen NAME | --random N --seed S
//
// JSON goes to stdout (or --out); human-readable tables go to stderr.

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qhm/qhm.hpp"

namespace {

using qhm::json;

struct InputOptions {
  std::vector<std::string> paths;
  std::string fixture;
  std::string format;  // empty: guess from extension
};

struct CommonOptions {
  InputOptions input;
  std::string out;
  qhm::Tolerances tol;
};

qhm::MatrixFormat resolve_format(const std::string& flag, const std::string& path) {
  if (flag == "csv") return qhm::MatrixFormat::kCsv;
  if (flag == "json") return qhm::MatrixFormat::kJson;
  return qhm::format_for_path(path);
}

std::vector<qhm::MetricSpace> load_inputs(const CommonOptions& opt) {
  std::vector<qhm::MetricSpace> spaces;
  if (!opt.input.fixture.empty()) spaces.push_back(qhm::make_fixture(opt.input.fixture));
  for (const auto& p : opt.input.paths) {
    spaces.push_back(
        qhm::load_space(p, resolve_format(opt.input.format, p), opt.tol.triangle_rel));
  }
  if (spaces.empty()) {
    throw CLI::ValidationError("input", "give an input file or --fixture NAME");
  }
  return spaces;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw qhm::Error(qhm::ErrorCode::kParse, "cli", "cannot write '" + out_path + "'");
  }
  f << text;
}

void emit_json(const json& doc, const std::string& out_path) {
  emit(doc.dump(2) + "\n", out_path);
}

struct TolFlag {
  std::string key, value;
};

// Splits --tol.KEY=VALUE / --tol.KEY VALUE out of argv before CLI11 sees it,
// so a detached value is never mistaken for a positional input.
std::vector<char*> split_tolerance_flags(int argc, char** argv, std::vector<TolFlag>& flags) {
  std::vector<char*> rest;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (i == 0 || arg.rfind("--tol.", 0) != 0) {
      rest.push_back(argv[i]);
      continue;
    }
    std::string key = arg.substr(6);
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      flags.push_back({key.substr(0, eq), key.substr(eq + 1)});
    } else if (i + 1 < argc) {
      flags.push_back({key, argv[++i]});
    } else {
      throw CLI::ValidationError(arg, "missing value");
    }
  }
  return rest;
}

void apply_tolerance_flags(const std::vector<TolFlag>& flags, qhm::Tolerances& tol) {
  for (const auto& [key, value] : flags) {
    const std::string arg = "--tol." + key;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size()) throw CLI::ValidationError(arg, "not a number: " + value);
    tol.set(key, v);
  }
}

void add_input_options(CLI::App* sub, CommonOptions& opt, bool many) {
  if (many) {
    sub->add_option("inputs", opt.input.paths, "Distance matrix files (CSV or JSON)");
  } else {
    sub->add_option("input", opt.input.paths, "Distance matrix file (CSV or JSON)")
        ->expected(0, 1);
  }
  sub->add_option("--fixture", opt.input.fixture,
                  "Built-in space: assouad5, equilateral3_6, cycle4_arclength, star_1_2, "
                  "twopoint(t), discrete(n,t)");
  sub->add_option("--format", opt.input.format, "Input format (default: by extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", opt.out, "Write JSON here instead of stdout");
}

int cmd_validate(const CommonOptions& opt) {
  if (opt.input.paths.empty() && opt.input.fixture.empty()) {
    throw CLI::ValidationError("input", "give an input file or --fixture NAME");
  }
  qhm::MatrixData data;
  if (!opt.input.fixture.empty()) {
    const auto s = qhm::make_fixture(opt.input.fixture);
    data = {s.dist(), s.labels()};
  } else {
    const auto& p = opt.input.paths.front();
    data = qhm::parse_matrix(qhm::read_file(p), resolve_format(opt.input.format, p));
  }
  json doc{{"n", data.dist.rows()}};
  const auto v = qhm::find_metric_violation(data.dist, opt.tol.triangle_rel);
  if (!v) {
    doc["valid"] = true;
    emit_json(doc, opt.out);
    return 0;
  }
  doc["valid"] = false;
  doc["indices"] = v->indices;
  doc["message"] = v->message;
  doc["code"] = static_cast<int>(v->code);
  emit_json(doc, opt.out);
  std::cerr << "invalid metric: " << v->message << "\n";
  return static_cast<int>(v->code);
}

json run_command(const std::string& cmd, const qhm::MetricSpace& space, int hyper_bound,
                 const qhm::Tolerances& tol) {
  if (cmd == "classify") {
    return qhm::classification_json(qhm::classify(space, hyper_bound, tol));
  }
  if (cmd == "m") return qhm::m_report_json(qhm::compute_m(space, tol));
  if (cmd == "mplus") {
    const auto r = qhm::compute_m_plus_detailed(space, tol);
    return {{"m_plus", r.value},
            {"measure", qhm::to_std(r.measure)},
            {"converged", r.converged},
            {"iterations", r.iterations}};
  }
  if (cmd == "embed") return qhm::embedding_json(qhm::sphere_diagnostics(space, tol));
  return qhm::build_report(space, hyper_bound, tol);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy constants and quasihypermetric diagnostics for finite metric spaces"};
  app.set_version_flag("--version", qhm::kVersion);
  app.require_subcommand(1);

  CommonOptions opt;
  try {
    opt.tol.apply_environment();
  } catch (const qhm::Error& e) {
    std::cerr << "error " << e.exit_code() << ": " << e.what() << "\n";
    return e.exit_code();
  }

  int hyper_bound = 1;
  int jobs = 1;
  bool table = false;
  std::string replay;

  auto* validate = app.add_subcommand("validate", "Check the metric axioms");
  add_input_options(validate, opt, false);

  std::vector<CLI::App*> analysis;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"classify", "Quasihypermetric, strict and bounded hypermetric verdicts"},
           {"m", "M(X), maximal measure and uniqueness"},
           {"mplus", "M+(X) over probability measures"},
           {"embed", "Schoenberg embedding, circumsphere and hull distance"},
           {"report", "Everything above plus geometric cross-checks"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_input_options(sub, opt, name == "report");
    if (name == "classify" || name == "report") {
      sub->add_option("--hyper-bound", hyper_bound, "Coefficient bound B for the hypermetric search")
          ->check(CLI::PositiveNumber);
    }
    if (name == "report") {
      sub->add_option("--jobs", jobs, "Process input files in parallel")->check(CLI::PositiveNumber);
      sub->add_flag("--table", table, "Also print a summary table to stderr");
      sub->add_option("--replay", replay,
                      "Re-run a previous report using its recorded input and tolerances");
    }
    analysis.push_back(sub);
  }

  std::string descriptor;
  int max_n = 64;
  std::uint64_t seed = 0;
  auto* approx = app.add_subcommand("approx", "M along nested dense samples of a compact space");
  approx->add_option("descriptor", descriptor,
                     "Descriptor JSON text or file, e.g. {\"kind\":\"circle\",\"circumference\":8}")
      ->required();
  approx->add_option("--max-n", max_n, "Largest sample size (default 64, or all cloud points)")->check(CLI::Range(2, 100000));
  approx->add_option("--seed", seed, "Sampler seed (point clouds only)");
  approx->add_option("--out", opt.out, "Write JSON here instead of stdout");

  std::string gen_name;
  std::string gen_format = "csv";
  int gen_random = 0;
  auto* gen = app.add_subcommand("gen", "Emit a fixture or random metric space");
  gen->add_option("name", gen_name, "Fixture name");
  gen->add_option("--random", gen_random, "Emit a random metric space with this many points");
  gen->add_option("--seed", seed, "Seed for --random");
  gen->add_option("--format", gen_format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  gen->add_option("--out", opt.out, "Write here instead of stdout");

  std::vector<TolFlag> tol_flags;
  try {
    auto rest = split_tolerance_flags(argc, argv, tol_flags);
    app.parse(static_cast<int>(rest.size()), rest.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    apply_tolerance_flags(tol_flags, opt.tol);
    const std::string cmd = app.get_subcommands().front()->get_name();

    if (cmd == "validate") return cmd_validate(opt);

    if (cmd == "gen") {
      if (gen_random > 0) {
        emit(qhm::serialize(qhm::random_metric(gen_random, seed),
                            gen_format == "json" ? qhm::MatrixFormat::kJson
                                                 : qhm::MatrixFormat::kCsv),
             opt.out);
        return 0;
      }
      if (gen_name.empty()) throw CLI::ValidationError("gen", "give a fixture name or --random N");
      emit(qhm::serialize(qhm::make_fixture(gen_name),
                          gen_format == "json" ? qhm::MatrixFormat::kJson : qhm::MatrixFormat::kCsv),
           opt.out);
      return 0;
    }

    if (cmd == "approx") {
      const std::string text =
          !descriptor.empty() && descriptor.front() == '{' ? descriptor : qhm::read_file(descriptor);
      json dj;
      try {
        dj = json::parse(text);
      } catch (const json::parse_error& e) {
        throw qhm::Error(qhm::ErrorCode::kBadInput, "cli", e.what());
      }
      const auto desc = qhm::parse_descriptor(dj);
      if (const auto* cloud = std::get_if<qhm::PointCloudSpace>(&desc);
          cloud && approx->count("--max-n") == 0) {
        max_n = static_cast<int>(cloud->points.size());
      }
      const auto trace = qhm::approx_m(desc, max_n, seed, opt.tol);
      json doc = qhm::trace_json(trace);
      doc["descriptor"] = qhm::descriptor_to_json(desc);
      doc["seed"] = seed;
      doc["tolerances"] = qhm::tolerances_json(opt.tol);
      std::fprintf(stderr, "%6s  %s\n", "n", "M(X_n)");
      for (std::size_t i = 0; i < trace.sizes.size(); ++i) {
        std::fprintf(stderr, "%6d  %s\n", trace.sizes[i],
                     qhm::m_json(trace.m_values[i]).dump().c_str());
      }
      emit_json(doc, opt.out);
      return trace.monotone_ok ? 0 : static_cast<int>(qhm::ErrorCode::kNonMonotone);
    }

    if (cmd == "report" && !replay.empty()) {
      json prev;
      int bound = 1;
      qhm::Tolerances tol;
      try {
        prev = json::parse(qhm::read_file(replay));
        bound = prev.at("hyper_bound").get<int>();
        tol = qhm::tolerances_from_json(prev.at("tolerances"));
      } catch (const json::exception& e) {
        throw qhm::Error(qhm::ErrorCode::kParse, "cli", "bad replay document: " + std::string(e.what()));
      }
      const auto data = qhm::parse_json(prev.at("input").dump());
      const qhm::MetricSpace space(data.dist, data.labels);
      emit_json(qhm::build_report(space, bound, tol), opt.out);
      return 0;
    }

    const auto spaces = load_inputs(opt);
    std::vector<json> docs(spaces.size());
    if (cmd == "report" && jobs > 1 && spaces.size() > 1) {
      const auto width = static_cast<std::size_t>(jobs);
      for (std::size_t start = 0; start < spaces.size(); start += width) {
        std::vector<std::future<json>> batch;
        for (std::size_t i = start; i < std::min(start + width, spaces.size()); ++i) {
          batch.push_back(std::async(std::launch::async, [&, i] {
            return run_command(cmd, spaces[i], hyper_bound, opt.tol);
          }));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) docs[start + k] = batch[k].get();
      }
    } else {
      for (std::size_t i = 0; i < spaces.size(); ++i) {
        docs[i] = run_command(cmd, spaces[i], hyper_bound, opt.tol);
      }
    }
    if (table && cmd == "report") {
      for (const auto& d : docs) std::cerr << qhm::report_table(d) << "\n";
    }
    emit_json(docs.size() == 1 ? docs.front() : json(docs), opt.out);
    return 0;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const qhm::Error& e) {
    std::cerr << "error " << e.exit_code() << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 20;
  }
}
