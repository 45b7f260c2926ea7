#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "edmdr/edm.hpp"
#include "edmdr/error.hpp"
#include "edmdr/io.hpp"
#include "edmdr/metrics.hpp"
#include "edmdr/projections.hpp"
#include "edmdr/random.hpp"
#include "edmdr/solver.hpp"

namespace edmdr {

enum class ObservationMode { Cutoff, CutoffPlusResidue, TopPercent, VdwOverlap };

inline const char* to_string(ObservationMode m) noexcept {
  switch (m) {
    case ObservationMode::Cutoff: return "cutoff";
    case ObservationMode::CutoffPlusResidue: return "cutoff+residue";
    case ObservationMode::TopPercent: return "top-percent";
    case ObservationMode::VdwOverlap: return "vdw";
  }
  return "?";
}

inline ObservationMode parse_observation_mode(const std::string& s) {
  if (s == "cutoff") return ObservationMode::Cutoff;
  if (s == "cutoff+residue") return ObservationMode::CutoffPlusResidue;
  if (s == "top-percent") return ObservationMode::TopPercent;
  if (s == "vdw") return ObservationMode::VdwOverlap;
  throw InvalidInput("unknown observation mode '" + s + "'");
}

/// Which inter-atomic distances are treated as measured. Thresholds are
/// distances in Angstrom; they are squared before comparing against EDM
/// entries.
struct ObservationModel {
  ObservationMode mode = ObservationMode::Cutoff;
  double cutoff = 6.0;
  double percent = 10.0;
  std::map<std::string, double> radii;

  static ObservationModel cutoff_model(double cutoff, bool with_residues = false) {
    ObservationModel m;
    m.mode = with_residues ? ObservationMode::CutoffPlusResidue : ObservationMode::Cutoff;
    m.cutoff = cutoff;
    return m;
  }

  static ObservationModel top_percent(double percent) {
    ObservationModel m;
    m.mode = ObservationMode::TopPercent;
    m.percent = percent;
    return m;
  }

  static ObservationModel vdw(std::map<std::string, double> radii) {
    ObservationModel m;
    m.mode = ObservationMode::VdwOverlap;
    m.radii = std::move(radii);
    return m;
  }

  void validate() const {
    switch (mode) {
      case ObservationMode::Cutoff:
      case ObservationMode::CutoffPlusResidue:
        if (!(cutoff > 0.0)) throw InvalidInput("cutoff must be positive");
        break;
      case ObservationMode::TopPercent:
        if (!(percent > 0.0 && percent <= 100.0))
          throw InvalidInput("percent must lie in (0, 100]");
        break;
      case ObservationMode::VdwOverlap:
        if (radii.empty()) throw InvalidInput("vdw mode requires a radii table");
        break;
    }
  }
};

/// Builds the measured partial EDM of a structure under an observation model.
///
/// Cutoff keeps pairs strictly closer than the cutoff; CutoffPlusResidue also
/// keeps every pair within one residue; TopPercent keeps the
/// ceil(percent/100 * m(m-1)/2) shortest pairs, ties broken by (i, j); and
/// VdwOverlap keeps pairs with distance <= r_i + r_j.
inline PartialEDM build_partial_edm(const PointCloud& pc, const ObservationModel& model) {
  model.validate();
  if (pc.empty()) throw InvalidInput("build_partial_edm: empty point cloud");
  const std::size_t m = pc.size();
  const Matrix d = edm_from_points(pc);
  PartialEDM out(m);

  switch (model.mode) {
    case ObservationMode::Cutoff:
    case ObservationMode::CutoffPlusResidue: {
      const double c2 = model.cutoff * model.cutoff;
      const bool residues = model.mode == ObservationMode::CutoffPlusResidue;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
          if (d(i, j) < c2 || (residues && pc.residues()[i] == pc.residues()[j]))
            out.set(i, j, d(i, j));
      break;
    }
    case ObservationMode::TopPercent: {
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      pairs.reserve(m * (m - 1) / 2);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(d(i, j), i, j);
      std::sort(pairs.begin(), pairs.end());
      const double wanted = model.percent * static_cast<double>(pairs.size()) / 100.0;
      const auto count = std::min(pairs.size(),
                                  static_cast<std::size_t>(std::ceil(wanted - 1e-9)));
      for (std::size_t k = 0; k < count; ++k) {
        const auto& [v, i, j] = pairs[k];
        out.set(i, j, v);
      }
      break;
    }
    case ObservationMode::VdwOverlap: {
      std::vector<double> r(m);
      for (std::size_t i = 0; i < m; ++i) {
        const auto it = model.radii.find(pc.elements()[i]);
        if (it == model.radii.end()) throw MissingRadius(pc.elements()[i]);
        r[i] = it->second;
      }
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
          const double reach = r[i] + r[j];
          if (d(i, j) <= reach * reach) out.set(i, j, d(i, j));
        }
      break;
    }
  }
  return out;
}

/// Problem instance for the completion solver: A = C1 (data), B = C2 (rank).
inline FeasibilityPair edm_feasibility_pair(const PartialEDM& partial, std::size_t rank) {
  DataConstraint data{partial};
  RankEdmConstraint rank_set(partial.order(), rank);
  return {[data](const Matrix& x) { return project_data(x, data); },
          [rank_set](const Matrix& x) { return project_rank_edm(x, rank_set); }};
}

/// Random start for one replication: symmetric hollow with U[0, d_max^2]
/// off-diagonal entries, d_max^2 the largest known squared distance.
inline Matrix initial_point(const PartialEDM& partial, std::uint64_t seed) {
  Rng rng(seed);
  const double scale = partial.max_value() > 0.0 ? partial.max_value() : 1.0;
  return random_hollow_symmetric(partial.order(), scale, rng);
}

struct ReplicationRecord {
  std::uint64_t seed = 0;
  double edm_error = 0.0;
  double position_error = 0.0;
  std::size_t iterations = 0;
  std::size_t b_projection_count = 0;
  double time_seconds = 0.0;
  std::string terminated;  // "converged", "max_iters" or "numerical_failure"
  std::string failure;     // message when terminated == "numerical_failure"

  // Artifacts, not serialized into the report.
  std::vector<TraceRecord> trace;
  std::optional<PointCloud> reconstruction;  // Procrustes-aligned to truth
};

struct RunOptions {
  std::size_t rank = 3;
  std::size_t replications = 5;
  /// Worker threads for replications; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

struct RunReport {
  nlohmann::json config;
  std::vector<ReplicationRecord> replications;
  std::size_t known_pairs = 0;

  double edm_error_mean() const { return mean_of(&ReplicationRecord::edm_error); }
  double edm_error_worst() const { return worst_of(&ReplicationRecord::edm_error); }
  double position_error_mean() const { return mean_of(&ReplicationRecord::position_error); }
  double position_error_worst() const { return worst_of(&ReplicationRecord::position_error); }
  double iterations_mean() const {
    double s = 0.0;
    for (const auto& r : replications) s += static_cast<double>(r.iterations);
    return replications.empty() ? 0.0 : s / static_cast<double>(replications.size());
  }

  /// Report JSON. With `include_timing` false the time_seconds fields are
  /// omitted so that reports of identical runs compare byte-for-byte.
  nlohmann::json to_json(bool include_timing = true) const {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : replications) {
      nlohmann::json j = {{"seed", r.seed},
                          {"edm_error", r.edm_error},
                          {"position_error", r.position_error},
                          {"iterations", r.iterations},
                          {"b_projection_count", r.b_projection_count},
                          {"terminated", r.terminated}};
      if (include_timing) j["time_seconds"] = r.time_seconds;
      if (!r.failure.empty()) j["failure"] = r.failure;
      reps.push_back(std::move(j));
    }
    return {{"config", config},
            {"replications", std::move(reps)},
            {"aggregate",
             {{"edm_error_mean", edm_error_mean()},
              {"edm_error_worst", edm_error_worst()},
              {"position_error_mean", position_error_mean()},
              {"position_error_worst", position_error_worst()},
              {"iterations_mean", iterations_mean()}}}};
  }

 private:
  double mean_of(double ReplicationRecord::*field) const {
    double s = 0.0;
    for (const auto& r : replications) s += r.*field;
    return replications.empty() ? 0.0 : s / static_cast<double>(replications.size());
  }
  double worst_of(double ReplicationRecord::*field) const {
    double w = 0.0;
    for (const auto& r : replications) w = std::max(w, r.*field);
    return w;
  }
};

/// One replication: solve, convert the shadow to points, align, score.
inline ReplicationRecord run_replication(const PointCloud& truth, const PartialEDM& partial,
                                         const SolverConfig& cfg, std::size_t rank) {
  ReplicationRecord rec;
  rec.seed = cfg.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto pair = edm_feasibility_pair(partial, rank);
    const auto result = douglas_rachford_periodic(pair, initial_point(partial, cfg.seed), cfg);
    const Matrix actual = edm_from_points(truth);
    rec.edm_error = edm_error(actual, result.shadow);
    const PointCloud points = points_from_edm(result.shadow, rank);
    if (points.dim() == truth.dim()) {
      auto aligned = procrustes_align(truth, points.with_labels_of(truth));
      rec.position_error = position_error(truth, aligned.aligned);
      rec.reconstruction = std::move(aligned.aligned);
    } else {
      rec.position_error = std::numeric_limits<double>::quiet_NaN();
      rec.reconstruction = points.with_labels_of(truth);
    }
    rec.iterations = result.iterations;
    rec.b_projection_count = result.b_projection_count;
    rec.terminated = to_string(result.terminated);
    rec.trace = result.trace;
  } catch (const NumericalFailure& e) {
    rec.terminated = "numerical_failure";
    rec.failure = e.what();
    rec.iterations = e.iteration();
    rec.edm_error = std::numeric_limits<double>::infinity();
    rec.position_error = std::numeric_limits<double>::infinity();
  }
  rec.time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

/// Replicated reconstruction from a given partial EDM. Replication k uses
/// seed cfg.seed + k; replications run on independent threads and the report
/// is assembled in replication order.
inline RunReport run_reconstruction(const PointCloud& truth, const PartialEDM& partial,
                                    const SolverConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  if (opts.replications < 1) throw InvalidInput("replications must be at least 1");
  if (partial.order() != truth.size())
    throw InvalidInput("partial EDM order does not match the structure");
  RankEdmConstraint(truth.size(), opts.rank);  // validates the rank bound

  RunReport report;
  report.known_pairs = partial.known_pairs();
  report.replications.resize(opts.replications);

  std::size_t workers = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, opts.replications);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < opts.replications; k += workers) {
        SolverConfig rep_cfg = cfg;
        rep_cfg.seed = cfg.seed + k;
        report.replications[k] = run_replication(truth, partial, rep_cfg, opts.rank);
      }
    });
  for (auto& t : pool) t.join();

  report.config = {{"atoms", truth.size()},
                   {"known_pairs", report.known_pairs},
                   {"rank", opts.rank},
                   {"epsilon", cfg.epsilon},
                   {"max_iters", cfg.max_iters},
                   {"period", cfg.period},
                   {"seed", cfg.seed},
                   {"replications", opts.replications}};
  return report;
}

inline RunReport run_reconstruction(const PointCloud& truth, const ObservationModel& model,
                                    const SolverConfig& cfg, const RunOptions& opts) {
  RunReport report = run_reconstruction(truth, build_partial_edm(truth, model), cfg, opts);
  report.config["mode"] = to_string(model.mode);
  switch (model.mode) {
    case ObservationMode::Cutoff:
    case ObservationMode::CutoffPlusResidue: report.config["cutoff"] = model.cutoff; break;
    case ObservationMode::TopPercent: report.config["percent"] = model.percent; break;
    case ObservationMode::VdwOverlap: report.config["radii"] = model.radii; break;
  }
  return report;
}

/// Writes report.json, partial_edm.csv, trace_<k>.csv and recon_<k>.xyz.
inline void write_artifacts(const std::filesystem::path& dir, const RunReport& report,
                            const PartialEDM& partial) {
  std::filesystem::create_directories(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "report.json");
    out << report.to_json().dump(2) << '\n';
  }
  {
    auto out = open(dir / "partial_edm.csv");
    write_partial_edm(out, partial);
  }
  for (std::size_t k = 0; k < report.replications.size(); ++k) {
    const auto& rec = report.replications[k];
    {
      auto out = open(dir / ("trace_" + std::to_string(k) + ".csv"));
      write_trace(out, rec.trace);
    }
    if (rec.reconstruction) {
      auto out = open(dir / ("recon_" + std::to_string(k) + ".xyz"));
      write_xyz(out, *rec.reconstruction,
                "replication " + std::to_string(k) + " seed " + std::to_string(rec.seed));
    }
  }
}

}  // namespace edmdr
