// Copyright 2026 The dilab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "dilab/charfun.hpp"
#include "dilab/dilation.hpp"

#ifndef DILAB_VERSION
#define DILAB_VERSION "0.0.0"
#endif

namespace dilab::harness {
namespace {

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

bool is_contraction_command(const std::string& c) {
  return c == "charfun" || c == "dilate" || c == "limit" || c == "beurling1";
}

bool is_contraction_kind(const std::string& k) {
  return k == "random_contraction" || k == "star_stable" || k == "unitary";
}

std::uint64_t read_count(const Json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ConfigError(where + ": expected a non-negative integer");
}

double read_unit_interval(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double x = j.get<double>();
  if (!(x > 0.0 && x < 1.0)) throw ConfigError(where + ": must lie in (0, 1)");
  return x;
}

void reject_unknown(const Json& j, const std::vector<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!contains(known, key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

std::size_t param(const ExperimentConfig& cfg, const char* key, std::size_t fallback) {
  if (!cfg.params.contains(key)) return fallback;
  const auto v = read_count(cfg.params.at(key), std::string("params.") + key);
  return static_cast<std::size_t>(v);
}

// Collects the pieces of a report.
class Recorder {
 public:
  void residual(const std::string& name, double value, double threshold, std::string note = {}) {
    checks_.push_back({name, value <= threshold, value, threshold, std::move(note)});
  }
  void flag(const std::string& name, bool pass, std::string note = {}) {
    checks_.push_back({name, pass, std::nullopt, std::nullopt, std::move(note)});
  }
  void curve(const std::string& quantity, const std::vector<double>& values, std::size_t first = 0) {
    for (std::size_t k = 0; k < values.size(); ++k) rows_.push_back({first + k, quantity, values[k]});
  }
  Json results = Json::object();

  RunResult finish(const ExperimentConfig& cfg, const Instance& inst) {
    RunResult out;
    out.checks = std::move(checks_);
    out.curves = std::move(rows_);
    Json checks = Json::array();
    for (const auto& c : out.checks) {
      Json e = {{"name", c.name}, {"pass", c.pass}};
      if (c.value) e["value"] = real_to_json(*c.value);
      if (c.threshold) e["threshold"] = real_to_json(*c.threshold);
      if (!c.note.empty()) e["note"] = c.note;
      checks.push_back(std::move(e));
    }
    std::map<std::string, std::pair<Json, Json>> curves;
    for (const auto& r : out.curves) {
      auto& [steps, values] = curves[r.quantity];
      steps.push_back(r.step);
      values.push_back(real_to_json(r.value));
    }
    Json curve_json = Json::object();
    for (auto& [q, sv] : curves) curve_json[q] = {{"step", sv.first}, {"value", sv.second}};
    out.report = {{"tool", "dilab"},
                  {"version", DILAB_VERSION},
                  {"command", cfg.command},
                  {"seed", cfg.seed},
                  {"config", config_to_json(cfg)},
                  {"instance", inst.echo},
                  {"results", results},
                  {"checks", checks},
                  {"curves", curve_json},
                  {"verdict", out.pass() ? "pass" : "fail"}};
    return out;
  }

 private:
  std::vector<Check> checks_;
  std::vector<CurveRow> rows_;
};

// h and the first f_degree levels random, the rest zero; unit norm overall.
DilationVector random_dilation_vector(Rng& rng, const DefectData& dd, std::size_t degree,
                                      std::size_t f_degree) {
  DilationVector v = zero_dilation_vector(dd, {degree, 0});
  v.h = rng.gaussian_vector(dd.dim_h());
  for (std::size_t k = 0; k < std::min(f_degree, degree); ++k) {
    v.levels[k] = rng.gaussian_vector(dd.dim_defect());
  }
  const double norm = v.norm();
  v.h /= norm;
  for (auto& level : v.levels) level /= norm;
  return v;
}

Index horizon_for(const std::string& kind, const Dims& dims) {
  if (dims.horizon > 0) return dims.horizon;
  return kind == "amplitude_damping" ? 40 : 24;
}

DefectData defect_of(const Instance& inst, const Tolerance& tol) {
  return defect_data(*inst.contraction, tol);
}

void run_charfun(const ExperimentConfig& cfg, const Instance& inst, Recorder& rec) {
  const DefectData dd = defect_of(inst, cfg.tol);
  const Matrix& t = dd.t();
  const Index d = dd.dim_h();
  const Matrix id = Matrix::Identity(d, d);
  rec.residual("rotation_unitary", unitarity_defect(dd.R), 1e-10);
  rec.residual("defect_square", op_norm(dd.D * dd.D - (id - t.adjoint() * t)), cfg.tol.residual_eps);
  rec.residual("defect_intertwining", op_norm(t * dd.D - dd.D_star * t), cfg.tol.residual_eps);

  const StabilityReport stab = star_stability(*inst.contraction, 64, cfg.tol);
  rec.results["spectral_radius"] = real_to_json(stab.spectral_radius);
  rec.results["star_stable"] = stab.is_star_stable;
  rec.results["dim_defect"] = dd.dim_defect();
  rec.results["dim_defect_star"] = dd.dim_defect_star();
  rec.results["rotation"] = matrix_to_json(dd.R);
  rec.curve("power_norm", stab.power_decay, 1);

  const std::size_t points = param(cfg, "points", 20);
  if (points == 0) throw ConfigError("params.points must be positive");
  if (stab.is_star_stable) {
    const CharacteristicFunction cf = theta_coefficients(dd);
    rec.results["degree"] = cf.degree();
    rec.results["tail_bound"] = real_to_json(cf.tail_bound);
    std::vector<double> norms;
    for (const auto& c : cf.coeffs) norms.push_back(op_norm(c));
    rec.curve("theta_norm", norms);

    double inner = 0.0;
    const Index dim = dd.dim_defect();
    for (std::size_t k = 0; k < points; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points);
      const Matrix theta = theta_eval(cf, std::polar(1.0, angle)).value;
      inner = std::max(inner, op_norm(theta.adjoint() * theta - Matrix::Identity(dim, dim)));
    }
    rec.residual("inner", inner, 1e-6);

    double isometry = 0.0;
    for (Index i = 0; i < d; ++i) {
      const EmbeddingC c = embed_C(dd, Vector::Unit(d, i), cf.degree());
      double sq = c.truncation_loss * c.truncation_loss;
      for (const auto& level : c.levels) sq += level.squaredNorm();
      isometry = std::max(isometry, std::abs(sq - 1.0));
    }
    rec.residual("c_isometry", isometry, cfg.tol.residual_eps);

    Rng rng(Rng::substream(cfg.seed, 1));
    const std::size_t f_degree = cfg.dims.degree > 0 ? static_cast<std::size_t>(cfg.dims.degree) : 4;
    const DilationVector v = random_dilation_vector(rng, dd, f_degree + 1, f_degree);
    rec.residual("intertwining", intertwining_residual(dd, v, v.degree() + cf.degree() + 1), 1e-8);
  } else {
    const std::size_t degree = cfg.dims.degree > 0 ? static_cast<std::size_t>(cfg.dims.degree) : 32;
    const CharacteristicFunction cf = theta_coefficients(dd, degree);
    rec.results["degree"] = cf.degree();
    std::vector<double> norms;
    for (const auto& c : cf.coeffs) norms.push_back(op_norm(c));
    rec.curve("theta_norm", norms);
    rec.results["note"] = "not *-stable: boundary values are not certified";
  }
}

void run_dilate(const ExperimentConfig& cfg, const Instance& inst, Recorder& rec) {
  const DefectData dd = defect_of(inst, cfg.tol);
  const std::size_t steps = param(cfg, "steps", 8);
  if (steps == 0) throw ConfigError("params.steps must be positive");
  const std::size_t f_degree = cfg.dims.degree > 0 ? static_cast<std::size_t>(cfg.dims.degree) : 2;
  const std::size_t degree = f_degree + steps + 1;
  Rng rng(Rng::substream(cfg.seed, 1));
  const DilationVector v = random_dilation_vector(rng, dd, degree, f_degree);
  rec.results["degree"] = degree;

  std::vector<double> residuals;
  for (std::size_t n = 1; n <= steps; ++n) residuals.push_back(power_factorization_residual(dd, n, v));
  rec.curve("factorization", residuals, 1);
  rec.residual("factorization", *std::max_element(residuals.begin(), residuals.end()), 1e-10);

  rec.residual("isometry", std::abs(dilation_apply(dd, v).norm() - v.norm()), cfg.tol.residual_eps);

  double legs = 0.0;
  for (std::size_t k = 0; k < degree; ++k) {
    DilationVector w = zero_dilation_vector(dd, {degree, k + 1});
    w.h = rng.gaussian_vector(dd.dim_h());
    for (auto& level : w.levels) level = rng.gaussian_vector(level.size());
    legs = std::max(legs, std::abs(leg_apply(dd, k, w).norm() - w.norm()));
  }
  rec.residual("leg_unitary", legs, cfg.tol.residual_eps);

  const Index d = dd.dim_h();
  double compression = 0.0;
  Matrix t_power = Matrix::Identity(d, d);
  std::vector<DilationVector> basis;
  for (Index i = 0; i < d; ++i) {
    DilationVector e = zero_dilation_vector(dd, {steps + 1, 0});
    e.h = Vector::Unit(d, i);
    basis.push_back(e);
  }
  for (std::size_t n = 1; n <= steps; ++n) {
    t_power = dd.t() * t_power;
    Matrix compressed(d, d);
    for (Index i = 0; i < d; ++i) {
      basis[static_cast<std::size_t>(i)] = dilation_apply(dd, basis[static_cast<std::size_t>(i)]);
      compressed.col(i) = basis[static_cast<std::size_t>(i)].h;
    }
    compression = std::max(compression, op_norm(compressed - t_power));
  }
  rec.residual("compression", compression, cfg.tol.residual_eps);
}

void run_limit(const ExperimentConfig& cfg, const Instance& inst, Recorder& rec) {
  const DefectData dd = defect_of(inst, cfg.tol);
  const std::size_t steps = param(cfg, "steps", 200);
  if (steps == 0) throw ConfigError("params.steps must be positive");
  const auto f_degree = static_cast<std::size_t>(cfg.dims.degree);
  Rng rng(Rng::substream(cfg.seed, 1));
  const DilationVector v = random_dilation_vector(rng, dd, std::max(steps, f_degree), f_degree);
  const LimitResult res = limit_product_What(dd, steps, v);

  rec.results["support_degree"] = res.support_degree;
  rec.results["constant"] = res.constant;
  rec.results["reference_tail"] = real_to_json(res.reference_tail);
  rec.results["final_error"] = real_to_json(res.errors.back());
  rec.results["final_h_norm"] = real_to_json(res.h_norms.back());
  rec.curve("error", res.errors, 1);
  rec.curve("h_norm", res.h_norms, 1);
  rec.curve("power_norm", res.power_norms, 1);

  rec.flag("error_bound", res.bound_holds);
  rec.residual("induction", res.induction_residual, 1e-10);
  rec.residual("final_error", res.errors.back(), 1e-8);
  if (f_degree == 0) {
    double gap = 0.0;
    Vector h = v.h;
    for (std::size_t n = 1; n <= steps; ++n) {
      h = dd.t().adjoint() * h;
      gap = std::max(gap, std::abs(res.h_norms[n - 1] - h.norm()));
    }
    rec.residual("h_component", gap, 1e-10);
  }
}

void run_beurling1(const ExperimentConfig& cfg, const Instance& inst, Recorder& rec) {
  const DefectData dd = defect_of(inst, cfg.tol);
  const std::size_t degree = cfg.dims.horizon > 0 ? static_cast<std::size_t>(cfg.dims.horizon)
                                                  : std::max<std::size_t>(truncation_rule(dd).degree, 2);
  const BeurlingResult res = beurling_residual(dd, degree, param(cfg, "low_degree", 0));
  const Index d = dd.dim_h();
  Matrix power = Matrix::Identity(d, d);
  for (Index k = 0; k < d; ++k) power = dd.t() * power;
  const bool nilpotent = op_norm(power) <= cfg.tol.rank_eps;
  const double threshold = nilpotent ? 1e-10 : 1e-6;
  rec.results["degree"] = res.degree;
  rec.results["low_degree"] = res.low_degree;
  rec.results["tail_bound"] = real_to_json(res.tail_bound);
  rec.results["nilpotent"] = nilpotent;
  rec.residual("beurling", res.residual, threshold);
  rec.residual("orthogonality", res.cross_cosine, threshold);
}

void run_cpcheck(const ExperimentConfig& cfg, const Instance& inst, Recorder& rec) {
  const std::size_t n_max = param(cfg, "steps", 0);
  try {
    const ErgodicityReport rep = equivalence_report(*inst.kraus, *inst.delta, n_max, cfg.tol);
    rec.results["fixed_space_dim"] = rep.fixed_space_dim;
    rec.results["ergodic"] = rep.is_ergodic;
    rec.results["absorbing"] = rep.is_absorbing;
    rec.results["second_modulus"] = real_to_json(rep.gap.second_modulus);
    rec.results["indeterminate"] = rep.gap.indeterminate;
    rec.results["monotonicity_slack"] = real_to_json(rep.monotonicity_slack);
    rec.results["limit_distance"] = real_to_json(rep.limit_distance);
    rec.results["limit_is_identity"] = rep.limit_is_identity;
    Json basis = Json::array();
    for (const auto& x : rep.fixed_space_basis) basis.push_back(matrix_to_json(x));
    rec.results["fixed_space_basis"] = basis;
    rec.curve("absorption", rep.convergence_curve, 1);
    rec.flag("agreement", rep.agree || rep.gap.indeterminate,
             rep.gap.indeterminate ? "spectral gap below 1e-3: indeterminate" : "");
    rec.residual("monotonicity", -rep.monotonicity_slack, 1e-9);
    rec.flag("limit_consistent", rep.limit_is_identity == rep.is_ergodic);
  } catch (const EquivalenceViolation& e) {
    rec.flag("agreement", false, e.what());
  }
}

// Convergence certificate or the partial one attached to Inconclusive.
struct CertifiedRun {
  std::optional<ToyCocycle> c_hat;
  std::optional<ConvergenceCertificate> cert;
  bool convergent = false;
  std::string failure;
};

CertifiedRun certify(const ToyCocycle& c, const ExperimentConfig& cfg) {
  CertifiedRun out;
  try {
    out.c_hat = gauge_modify(c, cfg.tol);
    out.cert = convergence_analyze(*out.c_hat, cfg.tol, cfg.conv_tol);
    out.convergent = true;
  } catch (const Inconclusive& e) {
    out.cert = e.partial();
    out.failure = e.what();
  } catch (const NoInvariantVector& e) {
    out.failure = e.what();
  } catch (const NotProductForm& e) {
    out.failure = e.what();
  }
  return out;
}

double max_exactness(const CertifiedRun& run, const ExperimentConfig& cfg) {
  double worst = 0.0;
  const Index steps = std::min<Index>(5, run.c_hat->horizon);
  for (Index n = 1; n <= steps; ++n) {
    worst = std::max(worst, exactness_residual(*run.c_hat, *run.cert, n, cfg.tol));
  }
  return worst;
}

void certificate_results(const CertifiedRun& run, Recorder& rec) {
  if (!run.cert) return;
  const ConvergenceCertificate& cert = *run.cert;
  rec.results["omega_hat"] = vector_to_json(cert.omega_hat);
  rec.results["q_defect"] = real_to_json(cert.q_defect);
  rec.results["isometry_defect"] = real_to_json(cert.isometry_defect);
  rec.results["cauchy_excess"] = real_to_json(cert.cauchy_excess);
  rec.results["cauchy_resolution"] = real_to_json(cert.cauchy_resolution);
  rec.results["cauchy_tail"] = real_to_json(cert.cauchy_tail);
  rec.results["range_increments"] = reals_to_json(cert.range_increments);
  rec.curve("delta", cert.delta_curve);
  rec.curve("delta_excited", cert.delta_curve_excited, 1);
  rec.curve("cauchy", cert.cauchy_curve);
}

void run_cocycle(const ExperimentConfig& cfg, const Instance& inst, Recorder& rec) {
  const ToyCocycle& c = *inst.cocycle;
  double adapted = 0.0;
  for (Index n = 1; n <= std::min<Index>(c.horizon, 3); ++n) {
    adapted = std::max(adapted, adaptedness_residual(c, n));
  }
  rec.residual("adaptedness", adapted, cfg.tol.residual_eps);
  double z_consistency = 0.0;
  for (Index n = 1; n <= std::min<Index>(c.horizon, 3); ++n) {
    Index dim = c.d;
    for (Index j = 0; j < n; ++j) dim *= c.m;
    if (dim <= 4096) z_consistency = std::max(z_consistency, z_consistency_residual(c, n));
  }
  rec.residual("z_consistency", z_consistency, cfg.tol.residual_eps);

  const CertifiedRun run = certify(c, cfg);
  rec.flag("vacuum_unit", run.c_hat.has_value(), run.c_hat ? "" : run.failure);
  if (run.c_hat) {
    rec.residual("vacuum_fixing", vacuum_fixing_residual(*run.c_hat), cfg.tol.residual_eps);
  }
  certificate_results(run, rec);
  if (run.cert) rec.flag("cauchy_bound", run.cert->cauchy_bound_holds);
  rec.flag("convergent", run.convergent, run.failure);
  if (run.convergent) {
    rec.residual("q_defect", run.cert->q_defect, cfg.conv_tol);
    rec.residual("exactness", max_exactness(run, cfg), cfg.conv_tol);
  }
}

void run_thm42(const ExperimentConfig& cfg, const Instance& inst, Recorder& rec) {
  const ToyCocycle& c = *inst.cocycle;
  const KrausMap z = compress_Z(c);
  const bool ergodic = fixed_point_space(z, cfg.tol).size() == 1;

  bool absorbing = false;
  try {
    const AbsorptionResult abs = absorbing_check(z, c.delta, param(cfg, "steps", 0), cfg.tol);
    absorbing = abs.absorbing;
    rec.curve("absorption", abs.curve, 1);
  } catch (const NotInvariant&) {
    absorbing = false;
  }

  const CertifiedRun run = certify(c, cfg);
  certificate_results(run, rec);
  const bool onto_q = run.convergent && run.cert->q_defect <= cfg.conv_tol;
  bool exact = false;
  if (onto_q) {
    const double ex = max_exactness(run, cfg);
    rec.results["exactness"] = real_to_json(ex);
    exact = ex <= cfg.conv_tol;
  }
  const BeurlingReport br = beurling_report(c, cfg.tol, cfg.conv_tol);
  rec.results["restriction_residual"] = real_to_json(br.restriction_residual);
  rec.results["purity_defect"] = real_to_json(br.purity_defect);
  rec.results["schmidt_rank"] = br.schmidt_rank;
  rec.results["delta_overlap"] = real_to_json(br.delta_overlap);
  if (!run.failure.empty()) rec.results["failure"] = run.failure;

  const Json clauses = {{"beurling_type", br.beurling_type},
                        {"exact", exact},
                        {"convergent_onto_q", onto_q},
                        {"absorbing", absorbing},
                        {"ergodic", ergodic}};
  rec.results["clauses"] = clauses;
  bool agree = true;
  for (const auto& [name, value] : clauses.items()) agree = agree && value.get<bool>() == ergodic;
  rec.flag("chain_agreement", agree);
  if (run.cert) rec.flag("cauchy_bound", run.cert->cauchy_bound_holds);
  rec.flag("product_state", !br.beurling_type || br.product_state_ok);
}

Json tolerance_json(const ExperimentConfig& cfg) {
  return {{"rank_eps", cfg.tol.rank_eps},
          {"residual_eps", cfg.tol.residual_eps},
          {"conv_tol", cfg.conv_tol}};
}

}  // namespace

ExperimentConfig parse_config(const Json& j, const std::string& command,
                              std::optional<std::uint64_t> seed_override) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(j, {"command", "seed", "dims", "tolerance", "instance", "params"}, "config");
  ExperimentConfig cfg;
  if (!contains(kCommands, command)) throw ConfigError("unknown command \"" + command + "\"");
  cfg.command = command;
  if (j.contains("command")) {
    if (!j["command"].is_string() || j["command"].get<std::string>() != command) {
      throw ConfigError("config: \"command\" disagrees with the command line");
    }
  }
  if (j.contains("seed")) cfg.seed = read_count(j["seed"], "seed");
  if (seed_override) cfg.seed = *seed_override;

  if (j.contains("dims")) {
    const Json& d = j["dims"];
    if (!d.is_object()) throw ConfigError("dims: expected an object");
    reject_unknown(d, {"d_H", "m", "N", "degree"}, "dims");
    auto read = [&](const char* key, Index& target, bool positive) {
      if (!d.contains(key)) return;
      const auto v = read_count(d[key], std::string("dims.") + key);
      if (positive && v == 0) throw ConfigError(std::string("dims.") + key + " must be positive");
      if (v > 4096) throw ConfigError(std::string("dims.") + key + " is too large");
      target = static_cast<Index>(v);
    };
    read("d_H", cfg.dims.d_h, true);
    read("m", cfg.dims.m, true);
    read("N", cfg.dims.horizon, false);
    read("degree", cfg.dims.degree, false);
  }

  if (j.contains("tolerance")) {
    const Json& t = j["tolerance"];
    if (!t.is_object()) throw ConfigError("tolerance: expected an object");
    reject_unknown(t, {"rank_eps", "residual_eps", "conv_tol"}, "tolerance");
    if (t.contains("rank_eps")) cfg.tol.rank_eps = read_unit_interval(t["rank_eps"], "tolerance.rank_eps");
    if (t.contains("residual_eps")) {
      cfg.tol.residual_eps = read_unit_interval(t["residual_eps"], "tolerance.residual_eps");
    }
    if (t.contains("conv_tol")) cfg.conv_tol = read_unit_interval(t["conv_tol"], "tolerance.conv_tol");
  }

  const bool contraction_cmd = is_contraction_command(command);
  cfg.kind = contraction_cmd ? "star_stable" : "amplitude_damping";
  if (j.contains("instance")) {
    const Json& inst = j["instance"];
    if (!inst.is_object()) throw ConfigError("instance: expected an object");
    reject_unknown(inst, {"kind", "lambda", "T", "u", "delta", "kraus"}, "instance");
    const bool has_data = inst.contains("T") || inst.contains("u") || inst.contains("kraus");
    if (inst.contains("kind")) {
      if (!inst["kind"].is_string()) throw ConfigError("instance.kind: expected a string");
      cfg.kind = inst["kind"].get<std::string>();
    } else if (has_data) {
      cfg.kind = "explicit";
    }
    if (!contains(kInstanceKinds, cfg.kind)) throw ConfigError("instance.kind: unknown \"" + cfg.kind + "\"");
    if (cfg.kind == "explicit") {
      if (!has_data) throw ConfigError("instance: explicit kind needs T, u or kraus");
      for (const char* key : {"T", "u", "delta", "kraus"}) {
        if (inst.contains(key)) cfg.explicit_instance[key] = inst[key];
      }
    } else if (has_data) {
      throw ConfigError("instance: matrices given for generated kind \"" + cfg.kind + "\"");
    }
    if (inst.contains("lambda")) {
      if (!inst["lambda"].is_number()) throw ConfigError("instance.lambda: expected a number");
      cfg.lambda = inst["lambda"].get<double>();
      if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw ConfigError("instance.lambda must lie in [0, 1]");
    }
  }

  // Command and instance kind must fit together.
  const bool explicit_t = cfg.kind == "explicit" && cfg.explicit_instance.contains("T");
  const bool explicit_u = cfg.kind == "explicit" && cfg.explicit_instance.contains("u");
  const bool explicit_k = cfg.kind == "explicit" && cfg.explicit_instance.contains("kraus");
  if (contraction_cmd && !(is_contraction_kind(cfg.kind) || explicit_t)) {
    throw ConfigError(command + " needs a contraction instance, not \"" + cfg.kind + "\"");
  }
  if (!contraction_cmd && (is_contraction_kind(cfg.kind) || explicit_t)) {
    throw ConfigError(command + " needs a cocycle or Kraus instance, not \"" + cfg.kind + "\"");
  }
  if ((command == "cocycle" || command == "thm42") && explicit_k) {
    throw ConfigError(command + " needs a cocycle generator u, not Kraus operators");
  }
  if ((explicit_u || explicit_k) && !cfg.explicit_instance.contains("delta")) {
    throw ConfigError("instance: u and kraus need a delta vector");
  }

  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("params: expected an object");
    reject_unknown(j["params"], {"steps", "points", "low_degree"}, "params");
    for (const auto& [key, value] : j["params"].items()) read_count(value, "params." + key);
    cfg.params = j["params"];
  }
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json inst = {{"kind", cfg.kind}, {"lambda", cfg.lambda}};
  for (const auto& [key, value] : cfg.explicit_instance.items()) inst[key] = value;
  return {{"command", cfg.command},
          {"seed", cfg.seed},
          {"dims",
           {{"d_H", cfg.dims.d_h}, {"m", cfg.dims.m}, {"N", cfg.dims.horizon}, {"degree", cfg.dims.degree}}},
          {"tolerance", tolerance_json(cfg)},
          {"instance", inst},
          {"params", cfg.params}};
}

Instance generate_instance(const std::string& kind, std::uint64_t seed, const Dims& dims, double lambda,
                           const Json& explicit_instance) {
  Instance out;
  out.kind = kind;
  Rng rng(Rng::substream(seed, 0));
  const Index n = horizon_for(kind, dims);
  if (kind == "random_contraction") {
    out.contraction = random_contraction(rng, dims.d_h);
  } else if (kind == "star_stable") {
    out.contraction = random_star_stable(rng, dims.d_h, 0.9);
  } else if (kind == "unitary") {
    out.contraction = random_unitary_contraction(rng, dims.d_h);
  } else if (kind == "amplitude_damping") {
    if (dims.d_h != 2 || dims.m != 2) throw BadDims("amplitude_damping: needs d_H = m = 2");
    out.cocycle = amplitude_damping_cocycle(lambda, n);
  } else if (kind == "random_cocycle") {
    out.cocycle = random_ergodic_cocycle(rng, dims.d_h, dims.m, n);
  } else if (kind == "nonergodic_cocycle") {
    out.cocycle = nonergodic_cocycle(dims.d_h, dims.m, n);
  } else if (kind == "identity_cocycle") {
    out.cocycle = identity_cocycle(dims.d_h, dims.m, n);
  } else if (kind == "explicit") {
    if (explicit_instance.contains("T")) {
      out.contraction = validate_contraction(matrix_from_json(explicit_instance["T"], "instance.T"));
    } else if (explicit_instance.contains("u")) {
      const Matrix u = matrix_from_json(explicit_instance["u"], "instance.u");
      const Vector delta = vector_from_json(explicit_instance["delta"], "instance.delta");
      const Index d = delta.size();
      if (u.rows() % d != 0) throw BadDims("instance.u: size is not a multiple of dim delta");
      out.cocycle = make_toy_cocycle(u, d, u.rows() / d, n, delta);
    } else if (explicit_instance.contains("kraus")) {
      const Json& ops = explicit_instance["kraus"];
      if (!ops.is_array() || ops.empty()) throw ConfigError("instance.kraus: expected a list of matrices");
      std::vector<Matrix> mats;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        mats.push_back(matrix_from_json(ops[k], "instance.kraus[" + std::to_string(k) + "]"));
      }
      out.kraus = make_kraus_map(std::move(mats));
      Vector delta = vector_from_json(explicit_instance["delta"], "instance.delta");
      if (delta.size() != out.kraus->dim()) throw DimensionMismatch("instance.delta: wrong dimension");
      if (delta.norm() == 0.0) throw BadDims("instance.delta: zero vector");
      out.delta = delta / delta.norm();
    } else {
      throw ConfigError("instance: explicit kind needs T, u or kraus");
    }
  } else {
    throw ConfigError("unknown instance kind \"" + kind + "\"");
  }

  out.echo = {{"kind", kind}};
  if (out.contraction) out.echo["T"] = matrix_to_json(out.contraction->matrix());
  if (out.cocycle) {
    out.kraus = compress_Z(*out.cocycle);
    out.delta = out.cocycle->delta;
    out.echo["u"] = matrix_to_json(out.cocycle->u);
    out.echo["d_H"] = out.cocycle->d;
    out.echo["m"] = out.cocycle->m;
    out.echo["N"] = out.cocycle->horizon;
  }
  if (out.kraus) {
    Json ops = Json::array();
    for (const auto& a : out.kraus->ops()) ops.push_back(matrix_to_json(a));
    out.echo["kraus"] = ops;
    out.echo["delta"] = vector_to_json(*out.delta);
  }
  return out;
}

bool RunResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

RunResult run(const ExperimentConfig& cfg) {
  const Instance inst = generate_instance(cfg.kind, cfg.seed, cfg.dims, cfg.lambda, cfg.explicit_instance);
  Recorder rec;
  if (cfg.command == "charfun") {
    run_charfun(cfg, inst, rec);
  } else if (cfg.command == "dilate") {
    run_dilate(cfg, inst, rec);
  } else if (cfg.command == "limit") {
    run_limit(cfg, inst, rec);
  } else if (cfg.command == "beurling1") {
    run_beurling1(cfg, inst, rec);
  } else if (cfg.command == "cpcheck") {
    run_cpcheck(cfg, inst, rec);
  } else if (cfg.command == "cocycle") {
    run_cocycle(cfg, inst, rec);
  } else if (cfg.command == "thm42") {
    run_thm42(cfg, inst, rec);
  } else {
    throw ConfigError("unknown command \"" + cfg.command + "\"");
  }
  return rec.finish(cfg, inst);
}

std::string report_text(const RunResult& result) { return result.report.dump(2) + "\n"; }

std::string curves_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream out;
  out << "step,quantity,value\n";
  for (const auto& r : rows) {
    const Json v = real_to_json(r.value);
    out << r.step << ',' << r.quantity << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return out.str();
}

void write_outputs(const std::string& dir, const RunResult& result, bool curves, double seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error(std::string("cannot write ") + (fs::path(dir) / name).string());
    f << text;
  };
  write("report.json", report_text(result));
  const Json timing = {{"command", result.report["command"]}, {"wall_seconds", seconds}};
  write("timing.json", timing.dump(2) + "\n");
  if (curves) write("curves.csv", curves_csv(result.curves));
}

}  // namespace dilab::harness
