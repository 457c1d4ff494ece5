#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <string>

#include <json.hpp>

#include "ilps/csv.hpp"
#include "ilps/diagnostics.hpp"

namespace ilps::io {

using json = nlohmann::json;

inline std::string component_header(Eigen::Index d) {
  std::string h;
  for (Eigen::Index m = 0; m < d; ++m) h += ",comp_" + std::to_string(m);
  return h;
}

/// Initial-ensemble CSV: `particle,comp_0,...,comp_{d-1}`, one row per particle.
inline void write_ensemble(std::ostream& out, const Ensemble& e) {
  out << "particle" << component_header(e.dim()) << '\n';
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    out << j;
    for (Eigen::Index m = 0; m < e.dim(); ++m) out << ',' << csv::fmt17(e.particles()(m, j));
    out << '\n';
  }
}

inline Ensemble read_ensemble(const std::string& path) {
  const csv::Table t = csv::read_numeric(path);
  if (t.header.size() < 2 || t.header[0] != "particle") {
    throw Error(ErrorCode::DataError, csv::location(path, 1, 1) + ": header must start with 'particle'");
  }
  const auto d = static_cast<Eigen::Index>(t.header.size() - 1);
  for (Eigen::Index m = 0; m < d; ++m) {
    if (t.header[static_cast<std::size_t>(m) + 1] != "comp_" + std::to_string(m)) {
      throw Error(ErrorCode::DataError, csv::location(path, 1, static_cast<std::size_t>(m) + 2) +
                                            ": expected 'comp_" + std::to_string(m) + "'");
    }
  }
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  PointCloud u(d, n);
  std::set<Eigen::Index> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double label = t.rows[r][0];
    const auto j = static_cast<Eigen::Index>(label);
    if (static_cast<double>(j) != label || j < 0 || j >= n || !seen.insert(j).second) {
      throw Error(ErrorCode::DataError, csv::location(path, r + 2, 1) + ": particle labels must be 0..J-1, unique");
    }
    for (Eigen::Index m = 0; m < d; ++m) u(m, j) = t.rows[r][static_cast<std::size_t>(m) + 1];
  }
  if (n < 2) throw Error(ErrorCode::DataError, path + ": need at least 2 particles");
  return Ensemble(std::move(u));
}

/// Trajectory CSV: `step,time,particle,comp_0,...,comp_{d-1}`.
inline void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << "step,time,particle" << component_header(traj.dim()) << '\n';
  for (const auto& snap : traj.snapshots) {
    const std::string prefix = std::to_string(snap.step) + ',' + csv::fmt17(snap.time) + ',';
    for (Eigen::Index j = 0; j < snap.ensemble.size(); ++j) {
      out << prefix << j;
      for (Eigen::Index m = 0; m < snap.ensemble.dim(); ++m) out << ',' << csv::fmt17(snap.ensemble.particles()(m, j));
      out << '\n';
    }
  }
}

inline json to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline json to_json(const SymMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Non-finite doubles become the strings "inf", "-inf" or "nan" so the
/// output stays valid JSON.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json to_json(const std::vector<KlPoint>& trace) {
  json arr = json::array();
  for (const auto& p : trace) arr.push_back({{"time", p.time}, {"kl", number(p.kl)}});
  return arr;
}

inline json to_json(const std::vector<BiasStudyRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"J", r.n_particles}, {"sigma2_hat", r.sigma2_hat}, {"sigma2_pred", r.sigma2_pred},
                   {"stderr", r.stderr}});
  }
  return arr;
}

inline json to_json(const std::vector<DivergenceRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"d", r.dim}, {"J", r.n_particles}, {"scheme", r.scheme}, {"max_rel_err", r.max_rel_err},
                   {"pass", r.pass}});
  }
  return arr;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline SymMatrix sym_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ConfigError, "expected a square array of arrays");
  const auto d = static_cast<Eigen::Index>(j.size());
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw Error(ErrorCode::ConfigError, "matrix must be square");
    }
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return SymMatrix::from_exact(m);
}

/// Opens `path` for writing, creating missing parent directories.
inline std::ofstream open_output(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::DataError, "cannot write " + path);
  return out;
}

/// Serialized with a trailing newline.
inline void write_json(const std::string& path, const json& j) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

}  // namespace ilps::io
