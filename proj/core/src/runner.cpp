/*
 * Copyright 2026 The skymin Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "skymin/runner.hpp"

#include <atomic>
#include <numbers>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "skymin/bounds.hpp"
#include "skymin/noma.hpp"
#include "skymin/oma.hpp"

namespace skymin::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw IoError("short write: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " -> " + path);
}

void dump_initial_programs(const Scenario& scn, Scheme scheme,
                           const std::string& dir) {
  std::ostringstream traj, power, order;
  if (scheme_is_noma(scheme)) {
    oma::LocalPoint seed =
        oma::init_solution(scn, oma::Variant::AdaptiveTime);
    Eigen::VectorXd tau0 = Eigen::Map<const Eigen::VectorXd>(
        seed.traj.durations.data(), scn.n_segments);
    Eigen::MatrixXd p0(scn.num_devices(), scn.n_segments);
    for (int k = 0; k < scn.num_devices(); ++k) {
      p0.row(k).setConstant(
          std::min(scn.p_max, scn.device_energy[k] / tau0.sum()));
    }
    noma::LocalPoint local = noma::LocalPoint::from_primal(
        seed.traj, tau0, p0, noma::init_order(seed.traj, scn), scn);
    noma::build_trajectory_subproblem(local, scn,
                                      scheme_is_straight(scheme))
        .prog.dump(traj);
    noma::build_power_subproblem(local, scn).prog.dump(power);
    if (scn.num_devices() > 1) {
      std::vector<Eigen::MatrixXd> half(
          scn.n_segments, Eigen::MatrixXd::Constant(scn.num_devices(),
                                                    scn.num_devices(), 0.5));
      for (auto& m : half) m.diagonal().setZero();
      noma::build_order_subproblem(local, scn, noma::PenaltyConfig{}, half)
          .prog.dump(order);
      write_atomic(dir + "/order_program.txt", order.str());
    }
  } else {
    const auto variant = scheme == Scheme::Oma1 ||
                                 scheme == Scheme::StraightOma1
                             ? oma::Variant::EqualTime
                             : oma::Variant::AdaptiveTime;
    oma::LocalPoint local = oma::init_solution(scn, variant);
    oma::build_trajectory_subproblem(local, scn, variant,
                                     scheme_is_straight(scheme))
        .prog.dump(traj);
    oma::build_power_subproblem(local, scn, variant).prog.dump(power);
  }
  write_atomic(dir + "/trajectory_program.txt", traj.str());
  write_atomic(dir + "/power_program.txt", power.str());
}

std::string trajectory_csv(const SolveReport& report) {
  std::ostringstream out;
  out << "n,x,y,T,V\n";
  const Trajectory& traj = report.trajectory;
  for (int n = 0; n <= traj.num_segments(); ++n) {
    out << n << "," << num(traj.waypoints[n].x()) << ","
        << num(traj.waypoints[n].y());
    if (n < traj.num_segments()) {
      out << "," << num(traj.durations[n]) << "," << num(traj.speed(n));
    } else {
      out << ",0,0";
    }
    out << "\n";
  }
  return out.str();
}

std::string allocation_csv(const SolveReport& report) {
  std::ostringstream out;
  out << "n,k,tau,p\n";
  if (report.oma) {
    for (int n = 0; n < report.oma->num_segments(); ++n) {
      for (int k = 0; k < report.oma->num_devices(); ++k) {
        out << n << "," << k << "," << num(report.oma->time_share(k, n))
            << "," << num(report.oma->power(k, n)) << "\n";
      }
    }
  } else if (report.noma) {
    for (int n = 0; n < report.noma->num_segments(); ++n) {
      for (int k = 0; k < report.noma->num_devices(); ++k) {
        out << n << "," << k << "," << num(report.noma->comm_time[n]) << ","
            << num(report.noma->power(k, n)) << "\n";
      }
    }
  }
  return out.str();
}

std::string convergence_csv(const SolveReport& report) {
  std::ostringstream out;
  out << "iter,eta\n";
  for (std::size_t i = 0; i < report.trace.size(); ++i) {
    out << i << "," << num(report.trace[i]) << "\n";
  }
  return out.str();
}

std::string order_csv(const SolveReport& report) {
  std::ostringstream out;
  out << "n,k,m,alpha\n";
  if (!report.noma) return out.str();
  const DecodingOrder& order = report.noma->order;
  for (int n = 0; n < order.num_segments(); ++n) {
    for (int k = 0; k < order.num_devices(); ++k) {
      for (int m = 0; m < order.num_devices(); ++m) {
        if (m == k) continue;
        out << n << "," << k << "," << m << "," << order.after(k, m, n)
            << "\n";
      }
    }
  }
  return out.str();
}

json audit_json(const AuditReport& audit) {
  json j;
  j["ok"] = audit.ok();
  j["violations"] = json::array();
  for (const auto& v : audit.violations) {
    j["violations"].push_back({{"constraint", v.constraint},
                               {"segment", v.segment},
                               {"device", v.device},
                               {"amount", v.amount},
                               {"relative", v.relative}});
  }
  return j;
}

std::string status_string(SolveReport::Status status) {
  switch (status) {
    case SolveReport::Status::Converged: return "converged";
    case SolveReport::Status::IterationCap: return "iteration-cap";
    case SolveReport::Status::SubproblemFailure: return "subproblem-failure";
  }
  return "?";
}

}  // namespace

SolveReport solve_scheme(const Scenario& scn, Scheme scheme, double tol,
                         double lambda, int max_outer) {
  switch (scheme) {
    case Scheme::UpperBound: {
      SolveReport report;
      report.scheme = scheme;
      report.status = SolveReport::Status::Converged;
      report.eta = bounds::hover_upper_bound(scn);
      report.solver_eta = report.eta;
      report.trace = {report.eta};
      report.per_device.resize(scn.num_devices());
      const double gamma_h =
          scn.gamma0 / (scn.altitude * scn.altitude);
      for (int k = 0; k < scn.num_devices(); ++k) {
        report.per_device[k] =
            scn.device_energy[k] * gamma_h / std::numbers::ln2;
      }
      return report;
    }
    case Scheme::Oma1:
    case Scheme::Oma2:
    case Scheme::StraightOma1:
    case Scheme::StraightOma2: {
      oma::SolveOptions opt;
      opt.variant = scheme == Scheme::Oma1 || scheme == Scheme::StraightOma1
                        ? oma::Variant::EqualTime
                        : oma::Variant::AdaptiveTime;
      opt.straight_line = scheme_is_straight(scheme);
      opt.tol = tol;
      opt.max_outer = max_outer;
      return oma::solve(scn, opt);
    }
    case Scheme::Noma:
    case Scheme::StraightNoma: {
      noma::SolveOptions opt;
      opt.straight_line = scheme_is_straight(scheme);
      opt.tol = tol;
      opt.max_outer = max_outer;
      if (lambda > 0.0) opt.penalty.lambda = lambda;
      return noma::solve(scn, opt);
    }
  }
  throw std::invalid_argument("solve_scheme: unknown scheme");
}

SolveReport run(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir);

  if (config.dump_conic && config.scheme != Scheme::UpperBound) {
    dump_initial_programs(config.scenario, config.scheme, config.out_dir);
  }

  SolveReport report = solve_scheme(config.scenario, config.scheme,
                                    config.tol, config.lambda,
                                    config.max_outer);

  json summary;
  summary["scheme"] = to_string(report.scheme);
  summary["status"] = status_string(report.status);
  if (!report.message.empty()) summary["message"] = report.message;
  summary["eta"] = report.eta;
  summary["solver_eta"] = report.solver_eta;
  summary["iterations"] = report.iterations;
  summary["wall_seconds"] = report.wall_seconds;
  summary["seed"] = config.seed;
  summary["hover_bound"] = bounds::hover_upper_bound(config.scenario);
  summary["audit"] = audit_json(report.audit);
  std::vector<double> per_device(report.per_device.data(),
                                 report.per_device.data() +
                                     report.per_device.size());
  summary["per_device"] = per_device;

  write_atomic(config.out_dir + "/summary.json", summary.dump(2) + "\n");
  if (config.scheme != Scheme::UpperBound) {
    write_atomic(config.out_dir + "/trajectory.csv", trajectory_csv(report));
    write_atomic(config.out_dir + "/allocation.csv", allocation_csv(report));
    write_atomic(config.out_dir + "/convergence.csv",
                 convergence_csv(report));
    if (scheme_is_noma(config.scheme)) {
      write_atomic(config.out_dir + "/order.csv", order_csv(report));
    }
  }
  return report;
}

namespace {

std::vector<SweepRow> run_grid(const RunConfig& base,
                               const std::vector<Scenario>& scenarios,
                               const std::vector<double>& values,
                               const std::vector<Scheme>& schemes,
                               int workers, const std::string& csv_name) {
  struct Cell {
    Scheme scheme;
    int value_index;
  };
  std::vector<Cell> cells;
  for (Scheme scheme : schemes) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      cells.push_back({scheme, static_cast<int>(i)});
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      SweepRow row;
      row.scheme = cell.scheme;
      row.value = values[cell.value_index];
      try {
        SolveReport rep =
            solve_scheme(scenarios[cell.value_index], cell.scheme, base.tol,
                         base.lambda, base.max_outer);
        row.eta = rep.eta;
        row.iterations = rep.iterations;
        row.status = rep.audit.ok() ? status_string(rep.status)
                                    : "audit-failed";
      } catch (const std::exception& e) {
        row.eta = std::numeric_limits<double>::quiet_NaN();
        row.status = std::string("error: ") + e.what();
      }
      rows[i] = row;
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::ostringstream csv;
  csv << "scheme,value,eta,iterations,status\n";
  for (const SweepRow& row : rows) {
    csv << to_string(row.scheme) << "," << num(row.value) << ","
        << num(row.eta) << "," << row.iterations << "," << row.status
        << "\n";
  }
  if (!base.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(base.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + base.out_dir);
    write_atomic(base.out_dir + "/" + csv_name, csv.str());
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep(const RunConfig& base, SweepParam param,
                            const std::vector<double>& values,
                            const std::vector<Scheme>& schemes,
                            int workers) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) {
      throw std::invalid_argument("sweep: values must be sorted ascending");
    }
  }
  std::vector<Scenario> scenarios;
  scenarios.reserve(values.size());
  for (double v : values) {
    Scenario scn = base.scenario;
    if (param == SweepParam::UavEnergy) {
      scn.uav_energy = v;
    } else {
      for (double& e : scn.device_energy) e = v;
    }
    scn.validate();
    scenarios.push_back(std::move(scn));
  }
  return run_grid(base, scenarios, values, schemes, workers, "sweep.csv");
}

std::vector<SweepRow> compare(const RunConfig& base,
                              const std::vector<Scheme>& schemes,
                              int workers) {
  std::vector<Scenario> one{base.scenario};
  std::vector<double> values{0.0};
  return run_grid(base, one, values, schemes, workers, "compare.csv");
}

}  // namespace skymin::runner
