// ctmc-limit: analyses of finite continuous-time Markov chains given by a
// right intensity matrix: validation, state classification, stationary and
// absorption probabilities, the large-time limit of exp(tB), the matrix
// exponential itself, the resolvent, Monte Carlo simulation, and a
// cross-check that compares the independent routes against each other.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctmc/chain.hpp"
#include "ctmc/errors.hpp"
#include "ctmc/io.hpp"
#include "ctmc/limit.hpp"
#include "ctmc/matrix.hpp"
#include "ctmc/oracles.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string path;
  std::string input_format = "auto";
  std::string output_format = "json";
  double tol = 1e-9;
  bool transpose = false;

  std::size_t class_id = 0;
  double time = 0.0;
  double z = 0.0;
  double horizon = 0.0;
  std::size_t trajectories = 10000;
  std::uint64_t seed = 1;
  double check_tol = 1e-8;
  double horizon_tol = 1e-10;
  double horizon_cap = 1048576.0;
};

/// Probabilities are reported with 15 significant digits.
double round15(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

json prob_vector_json(const std::vector<double>& v) {
  json row = json::array();
  for (double x : v) row.push_back(round15(x));
  return row;
}

json prob_matrix_json(const ctmc::Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(round15(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json rate_matrix_json(const ctmc::Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json index_set_json(const std::vector<std::size_t>& ids) {
  json arr = json::array();
  for (std::size_t i : ids) arr.push_back(i);
  return arr;
}

json class_structure_json(const ctmc::ClassStructure& s, const std::vector<std::string>& labels) {
  json out;
  json classes = json::array();
  for (const auto& members : s.classes) classes.push_back(index_set_json(members));
  out["classes"] = std::move(classes);
  out["transient"] = index_set_json(s.transient);
  if (!labels.empty()) {
    json class_labels = json::array();
    for (const auto& members : s.classes) {
      json names = json::array();
      for (std::size_t i : members) names.push_back(labels[i]);
      class_labels.push_back(std::move(names));
    }
    out["class_labels"] = std::move(class_labels);
    json transient_labels = json::array();
    for (std::size_t i : s.transient) transient_labels.push_back(labels[i]);
    out["transient_labels"] = std::move(transient_labels);
  }
  return out;
}

ctmc::MatrixDocument load_document(const Options& opts) {
  ctmc::MatrixDocument doc =
      opts.input_format == "auto"
          ? ctmc::parse_matrix(opts.path)
          : ctmc::parse_matrix(opts.path, opts.input_format == "json" ? ctmc::MatrixFormat::json
                                                                      : ctmc::MatrixFormat::csv);
  if (opts.transpose) doc.rates = doc.rates.transposed();
  return doc;
}

ctmc::IntensityMatrix load_intensity(const Options& opts, const ctmc::MatrixDocument& doc) {
  ctmc::IntensityMatrix b = ctmc::validate(doc.rates, opts.tol);
  b.labels = doc.states;
  return b;
}

json input_json(const Options& opts, const ctmc::MatrixDocument& doc) {
  json in;
  in["path"] = opts.path;
  in["n"] = doc.size();
  if (!doc.states.empty()) in["states"] = doc.states;
  if (opts.transpose) in["transposed"] = true;
  return in;
}

// ---- text rendering --------------------------------------------------------

bool is_numeric_matrix(const json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const json& row : j) {
    if (!row.is_array() || row.empty()) return false;
    for (const json& v : row)
      if (!v.is_number_float()) return false;  // index sets stay inline
  }
  return true;
}

std::string cell_text(const json& v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
  return buf;
}

void render_text(std::ostream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object() || is_numeric_matrix(value) ||
          (value.is_array() && !value.empty() && value[0].is_object())) {
        os << pad << key << ":\n";
        render_text(os, value, indent + 1);
      } else if (value.is_array()) {
        os << pad << key << ": " << value.dump() << "\n";
      } else if (value.is_string()) {
        os << pad << key << ": " << value.get<std::string>() << "\n";
      } else {
        os << pad << key << ": " << value.dump() << "\n";
      }
    }
  } else if (is_numeric_matrix(j)) {
    std::size_t width = 0;
    for (const json& row : j)
      for (const json& v : row) width = std::max(width, cell_text(v).size());
    for (const json& row : j) {
      os << pad;
      for (const json& v : row) {
        const std::string s = cell_text(v);
        os << std::string(width - s.size() + 2, ' ') << s;
      }
      os << "\n";
    }
  } else if (j.is_array()) {
    for (const json& item : j) {
      render_text(os, item, indent);
      os << "\n";
    }
  } else {
    os << pad << j.dump() << "\n";
  }
}

void emit_report(const Options& opts, const json& report) {
  if (opts.output_format == "text") {
    render_text(std::cout, report, 0);
  } else {
    std::cout << report.dump(2) << "\n";
  }
}

// ---- subcommands -----------------------------------------------------------

json run_validate(const Options& opts) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);
  json report;
  report["command"] = "validate";
  report["input"] = input_json(opts, doc);
  report["rates"] = rate_matrix_json(b.b);
  return report;
}

json run_classes(const Options& opts) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);
  const ctmc::ClassStructure s = ctmc::classify_states(b);
  json report = class_structure_json(s, b.labels);
  report["command"] = "classes";
  report["input"] = input_json(opts, doc);
  return report;
}

json run_stationary(const Options& opts) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);
  const ctmc::ClassStructure s = ctmc::classify_states(b);
  const ctmc::StationaryVector sv = ctmc::stationary_distribution(b, s, opts.class_id);
  json report;
  report["command"] = "stationary";
  report["input"] = input_json(opts, doc);
  report["class"] = opts.class_id;
  report["members"] = index_set_json(s.classes[opts.class_id]);
  report["p"] = prob_vector_json(sv.p);
  return report;
}

json run_limit(const Options& opts) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);
  const ctmc::FinalLimit limit = ctmc::final_limit(b);

  json report = class_structure_json(limit.structure, b.labels);
  report["command"] = "limit";
  report["input"] = input_json(opts, doc);
  json stationary = json::array();
  for (const auto& sv : limit.stationary) {
    stationary.push_back(json{{"class", sv.class_id}, {"p", prob_vector_json(sv.p)}});
  }
  report["stationary"] = std::move(stationary);
  if (!limit.absorption.empty()) {
    json absorption = json::array();
    for (std::size_t t = 0; t < limit.absorption.transient_states.size(); ++t) {
      json entry;
      entry["state"] = limit.absorption.transient_states[t];
      if (!b.labels.empty()) entry["label"] = b.labels[limit.absorption.transient_states[t]];
      entry["f"] = prob_vector_json(limit.absorption.f[t]);
      absorption.push_back(std::move(entry));
    }
    report["absorption"] = std::move(absorption);
  }
  report["limit"] = prob_matrix_json(limit.p);
  return report;
}

json run_expm(const Options& opts) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);
  json report;
  report["command"] = "expm";
  report["input"] = input_json(opts, doc);
  report["time"] = opts.time;
  report["exp"] = prob_matrix_json(ctmc::transition_matrix(b, opts.time));
  return report;
}

json run_resolvent(const Options& opts) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);
  json report;
  report["command"] = "resolvent";
  report["input"] = input_json(opts, doc);
  report["z"] = opts.z;
  report["resolvent"] = prob_matrix_json(ctmc::resolvent(b, opts.z));
  return report;
}

json run_simulate(const Options& opts) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);
  const ctmc::SimulationResult result =
      ctmc::simulate(b, opts.horizon, opts.trajectories, opts.seed);
  json report;
  report["command"] = "simulate";
  report["input"] = input_json(opts, doc);
  report["horizon"] = result.horizon;
  report["trajectories"] = result.trajectories_per_start;
  report["seed"] = result.seed;
  report["empirical"] = prob_matrix_json(result.empirical);
  return report;
}

json run_check(const Options& opts, bool& pass) {
  const ctmc::MatrixDocument doc = load_document(opts);
  const ctmc::IntensityMatrix b = load_intensity(opts, doc);

  const ctmc::FinalLimit limit = ctmc::final_limit(b);
  const ctmc::HorizonEstimate horizon =
      ctmc::adaptive_horizon_detail(b, opts.horizon_tol, opts.horizon_cap);
  const ctmc::Matrix large_t = ctmc::transition_matrix(b, horizon.t_star);

  const double limit_vs_expm = ctmc::max_abs_diff(limit.p, large_t);

  const std::vector<double> z_grid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  json resolvent_errors = json::array();
  double previous = -1.0;
  bool monotone = true;
  double final_error = 0.0;
  double expm_vs_resolvent = 0.0;
  for (double z : z_grid) {
    const ctmc::Matrix r = ctmc::resolvent(b, z);
    const double err = ctmc::max_abs_diff(r, limit.p);
    resolvent_errors.push_back(json{{"z", z}, {"max_abs_diff", err}});
    if (previous >= 0.0 && err > previous) monotone = false;
    previous = err;
    final_error = err;
    expm_vs_resolvent = ctmc::max_abs_diff(r, large_t);
  }

  pass = limit_vs_expm <= opts.check_tol && monotone && final_error <= 1e-3;

  json report;
  report["command"] = "check";
  report["input"] = input_json(opts, doc);
  report["t_star"] = horizon.t_star;
  if (std::isfinite(horizon.gap_estimate)) report["gap_estimate"] = horizon.gap_estimate;
  report["check_tol"] = opts.check_tol;
  report["discrepancies"] = json{
      {"limit_vs_expm", limit_vs_expm},
      {"limit_vs_resolvent", std::move(resolvent_errors)},
      {"expm_vs_resolvent_at_final_z", expm_vs_resolvent},
  };
  report["resolvent_monotone"] = monotone;
  report["pass"] = pass;
  return report;
}

int fail_with(const ctmc::Error& e) {
  const bool input_side = dynamic_cast<const ctmc::InputError*>(&e) != nullptr;
  const int code = input_side ? 1 : 2;
  json err = {{"error", {{"kind", e.kind()}, {"message", e.what()}, {"exit_code", code}}}};
  std::cerr << err.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"final limits of finite continuous-time Markov chains"};
  app.require_subcommand(1);

  Options opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", opts.path, "matrix file (JSON or CSV)")->required();
    sub->add_option("--format-in", opts.input_format, "input format")
        ->check(CLI::IsMember({"auto", "json", "csv"}))
        ->capture_default_str();
    sub->add_option("--format", opts.output_format, "report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    sub->add_option("--tol", opts.tol, "validation tolerance")->capture_default_str();
    sub->add_flag("--transpose", opts.transpose,
                  "transpose the input (column-convention intensity matrices)");
  };

  CLI::App* cmd_validate = app.add_subcommand("validate", "validate and echo the normalized matrix");
  CLI::App* cmd_classes = app.add_subcommand("classes", "recurrence classes and transient states");
  CLI::App* cmd_stationary =
      app.add_subcommand("stationary", "stationary distribution of one recurrence class");
  CLI::App* cmd_limit = app.add_subcommand("limit", "final limit of the transition matrix");
  CLI::App* cmd_expm = app.add_subcommand("expm", "transition matrix exp(tB)");
  CLI::App* cmd_resolvent = app.add_subcommand("resolvent", "z(zI - B)^-1 for z > 0");
  CLI::App* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo jump-process simulation");
  CLI::App* cmd_check =
      app.add_subcommand("check", "compare the direct limit against its oracles");

  for (CLI::App* sub : {cmd_validate, cmd_classes, cmd_stationary, cmd_limit, cmd_expm,
                        cmd_resolvent, cmd_simulate, cmd_check}) {
    add_common(sub);
  }
  cmd_stationary->add_option("--class", opts.class_id, "recurrence class id")->required();
  cmd_expm->add_option("--time", opts.time, "time t >= 0")->required();
  cmd_resolvent->add_option("--z", opts.z, "evaluation point z > 0")->required();
  cmd_simulate->add_option("--horizon", opts.horizon, "simulation horizon")->required();
  cmd_simulate->add_option("--trajectories", opts.trajectories, "trajectories per start state")
      ->capture_default_str();
  cmd_simulate->add_option("--seed", opts.seed, "RNG seed")->capture_default_str();
  cmd_check->add_option("--check-tol", opts.check_tol, "oracle comparison tolerance")
      ->capture_default_str();
  cmd_check->add_option("--horizon-tol", opts.horizon_tol, "adaptive horizon tolerance")
      ->capture_default_str();
  cmd_check->add_option("--horizon-cap", opts.horizon_cap, "adaptive horizon cap")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err = {{"error", {{"kind", "usage"}, {"message", e.what()}, {"exit_code", 1}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }

  try {
    if (cmd_validate->parsed()) {
      emit_report(opts, run_validate(opts));
    } else if (cmd_classes->parsed()) {
      emit_report(opts, run_classes(opts));
    } else if (cmd_stationary->parsed()) {
      emit_report(opts, run_stationary(opts));
    } else if (cmd_limit->parsed()) {
      emit_report(opts, run_limit(opts));
    } else if (cmd_expm->parsed()) {
      emit_report(opts, run_expm(opts));
    } else if (cmd_resolvent->parsed()) {
      emit_report(opts, run_resolvent(opts));
    } else if (cmd_simulate->parsed()) {
      emit_report(opts, run_simulate(opts));
    } else if (cmd_check->parsed()) {
      bool pass = false;
      const json report = run_check(opts, pass);
      emit_report(opts, report);
      if (!pass) {
        json err = {{"error",
                     {{"kind", "oracle-mismatch"},
                      {"message", "oracle triangle comparison failed, see report"},
                      {"exit_code", 2}}}};
        std::cerr << err.dump() << "\n";
        return 2;
      }
    }
  } catch (const ctmc::Error& e) {
    return fail_with(e);
  } catch (const std::exception& e) {
    json err = {{"error", {{"kind", "internal"}, {"message", e.what()}, {"exit_code", 2}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 0;
}
