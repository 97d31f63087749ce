#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <thread>

#include <CLI11.hpp>

#include "config.hpp"
#include "output.hpp"
#include "radpml/erroracle.hpp"
#include "radpml/fundsol.hpp"
#include "radpml/hardy_oracle.hpp"
#include "radpml/solver1d.hpp"

using namespace radpml;
using cli::ConfigError;
using cli::KeySpec;
using cli::KeyType;
using cli::Schema;
using cli::Settings;
using cli::Table;

namespace {

struct Common {
  std::string config, out;
  bool svg = false;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
};

struct Result {
  Table table;
  cli::PlotStyle style = cli::PlotStyle::Lines;
  std::string failure;  // non-empty when a computation missed its own tolerance
};

// Failures of individual items are rethrown in index order so the reported error is reproducible.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errs(n);
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += threads) {
      try {
        f(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

Schema operator+(Schema a, const Schema& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Schema aniso_keys() {
  return {{"aniso.a11", KeyType::Number, "1", {}},
          {"aniso.a12", KeyType::Number, "0", {}},
          {"aniso.a22", KeyType::Number, "1", {}}};
}

Schema pml_keys(const std::string& R, const std::string& L, const std::string& sigma, const std::string& gamma) {
  return {{"pml.R", KeyType::Number, R, {}},
          {"pml.L", KeyType::Number, L, {}},
          {"pml.sigma_c", KeyType::Number, sigma, {}},
          {"pml.gamma", KeyType::Number, gamma, {}}};
}

Schema system_keys() {
  return aniso_keys() + pml_keys("1", "1", "20", "10") +
         Schema{{"geometry", KeyType::Text, "radial", {"radial", "halfline"}},
                {"exterior.kind", KeyType::Text, "ie", {"truncated", "mapped", "ie"}},
                {"basis.kind", KeyType::Text, "two-pole", {"one-pole", "two-pole"}},
                {"basis.eta", KeyType::Number, "20", {}},
                {"basis.N", KeyType::Integer, "10", {}},
                {"mesh.h", KeyType::Number, "0.05", {}},
                {"mesh.k", KeyType::Integer, "3", {}}};
}

Anisotropy anisotropy(const Settings& s) {
  Mat2 a;
  a << s.number("aniso.a11"), s.number("aniso.a12"), s.number("aniso.a12"), s.number("aniso.a22");
  return Anisotropy::from_a(a);
}

RadialBasisSpec basis(const Settings& s) {
  const int n = s.integer("basis.N");
  return s.text("basis.kind") == "one-pole" ? RadialBasisSpec::one_pole(n)
                                            : RadialBasisSpec::two_pole(s.number("basis.eta"), n);
}

ShiftedScaling scaling(const Settings& s) {
  return {DampingProfile(s.number("pml.R"), s.number("pml.sigma_c")), s.number("pml.gamma")};
}

System build_system(const Settings& s, Signal boundary) {
  const ShiftedScaling sc = scaling(s);
  const double R = s.number("pml.R"), L = s.number("pml.L");
  const std::string& kind = s.text("exterior.kind");
  const Mesh1D mesh = Mesh1D::uniform(0.0, R, kind == "ie" ? R : R + L, s.number("mesh.h"), s.integer("mesh.k"));
  ExteriorTreatment tr = TruncatedPML{L};
  if (kind == "mapped") tr = MappedPML{L};
  if (kind == "ie") tr = InfiniteElement{basis(s)};
  const Anisotropy an = anisotropy(s);
  if (s.text("geometry") == "radial") return assemble_radial_system(an, sc, mesh, tr);
  if (!an.a.isApprox(Mat2::Identity(), 1e-14)) throw ConfigError("halfline geometry needs the identity material");
  return assemble_halfline_system(sc, mesh, tr, std::move(boundary));
}

Result cmd_stability_map(const Settings& s, const Common& c) {
  const Anisotropy an = anisotropy(s);
  const DampingProfile prof(s.number("pml.R"), 1.0);
  const int n = s.integer("grid.n");
  const int samples = s.integer("grid.samples");
  if (n < 16) throw ConfigError("grid.n must be at least 16");
  const double R = prof.radius_pml;
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 y(-R + 2.0 * R * i / (n - 1), -R + 2.0 * R * j / (n - 1));
      if (y.norm() < R) pts.push_back(y);
    }
  std::vector<std::vector<double>> rows(pts.size());
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    const PointClass pc = classify_point(an, prof, pts[i], samples);
    const bool bad = pc.verdict == Verdict::Unstable;
    const double ang = bad ? std::atan2(pc.witness_direction->y(), pc.witness_direction->x()) : std::nan("");
    rows[i] = {pts[i].x(), pts[i].y(), bad ? 1.0 : 0.0, ang};
  });
  Result r{Table({"y1", "y2", "verdict", "witness_angle"}), cli::PlotStyle::Points, {}};
  for (auto& row : rows) r.table.add(std::move(row));
  return r;
}

Result cmd_slowness(const Settings& s, const Common&) {
  const int n = s.integer("grid.n");
  const auto pts = slowness_curve(anisotropy(s), n);
  Result r{Table({"angle", "p1", "p2"}), cli::PlotStyle::Lines, {}};
  for (int i = 0; i < n; ++i) r.table.add({2.0 * std::numbers::pi * i / n, pts[i].x(), pts[i].y()});
  return r;
}

Result cmd_spectrum(const Settings& s, const Common&) {
  const System sys = build_system(s, Signal::zero());
  const SpectrumResult sp = discrete_spectrum(sys);
  Result r{Table({"re_s", "im_s"}), cli::PlotStyle::Points, {}};
  for (const auto& e : sp.eigenvalues) r.table.add({e.real(), e.imag()});
  if (sp.defective)
    r.failure = "discrete_spectrum: eigen-residual " + cli::format_number(sp.max_residual) + " exceeds 1e-8";
  return r;
}

Result cmd_run1d(const Settings& s, const Common&) {
  const bool radial = s.text("geometry") == "radial";
  std::string sig = s.text("signal.name");
  if (sig == "auto") sig = radial ? "sine-burst" : "bump";
  if (radial && sig == "bump") throw ConfigError("signal.name 'bump' is boundary data; radial runs take sine-burst, gaussian-pulse or zero");
  if (!radial && sig == "gaussian-pulse") throw ConfigError("signal.name 'gaussian-pulse' is an initial state for radial runs");

  const Signal boundary = radial ? Signal::zero() : named_signal(sig);
  const System sys = build_system(s, boundary);
  const double dt = s.number("time.dt"), T = s.number("time.T");
  const int stride = s.integer("output.stride");
  if (!(T > 0.0)) throw ConfigError("time.T must be positive");
  if (stride < 1) throw ConfigError("output.stride must be at least 1");
  const int steps = static_cast<int>(std::lround(T / dt));

  CrankNicolson cn(sys, dt);
  Solver1DState st = zero_state(sys);
  if (radial && sig == "sine-burst") cn.set_source(sine_burst());
  if (radial && sig == "gaussian-pulse") st = initial_state(sys, gaussian_pulse_profile());

  const bool with_ref = s.flag("reference.enabled");
  std::optional<System> ref;
  std::optional<CrankNicolson> ref_cn;
  Solver1DState ref_st;
  Rule er;
  Eigen::SparseMatrix<double> s_sys, s_ref;
  if (with_ref) {
    const double R = s.number("pml.R"), h = s.number("mesh.h");
    const double outer = R + 0.5 * T + 1.0;
    const ShiftedScaling free(DampingProfile(R, 0.0), 0.0);
    const Mesh1D mesh = Mesh1D::uniform(0.0, R, outer, h, s.integer("mesh.k"));
    if (radial)
      ref = assemble_radial_system(anisotropy(s), free, mesh, TruncatedPML{outer - R});
    else
      ref = assemble_halfline_system(free, mesh, TruncatedPML{outer - R}, boundary);
    ref_cn.emplace(*ref, dt);
    ref_st = zero_state(*ref);
    if (radial && sig == "sine-burst") ref_cn->set_source(sine_burst());
    if (radial && sig == "gaussian-pulse") ref_st = initial_state(*ref, gaussian_pulse_profile());
    er = error_rule(sys, 0.0, R, std::max(1, static_cast<int>(std::ceil(R / h - 1e-9))), s.integer("mesh.k") + 3);
    s_sys = interpolation_matrix(sys, er.x);
    s_ref = interpolation_matrix(*ref, er.x);
  }

  std::vector<std::string> cols{"t", "energy", "interior_energy"};
  if (with_ref) cols.push_back("interior_error");
  Result r{Table(cols), cli::PlotStyle::Lines, {}};
  auto emit = [&] {
    std::vector<double> row{st.t, energy(st, sys), energy(st, sys, EnergyKind::Interior)};
    if (with_ref) {
      const Eigen::VectorXd d = s_sys * st.x - s_ref * ref_st.x;
      double acc = 0.0;
      for (std::size_t j = 0; j < er.size(); ++j) acc += er.w[j] * d[j] * d[j];
      row.push_back(std::sqrt(acc));
    }
    r.table.add(std::move(row));
  };
  emit();
  for (int n = 1; n <= steps; ++n) {
    cn.step(st);
    if (with_ref) ref_cn->step(ref_st);
    if (!st.x.allFinite()) throw NumericalFailure("step_crank_nicolson: state is no longer finite");
    if (n % stride == 0 || n == steps) emit();
  }
  return r;
}

ErrorSeriesParams series_params(const Settings& s) {
  ErrorSeriesParams p;
  p.radius_pml = s.number("pml.R");
  p.width = s.number("pml.L");
  p.sigma_c = s.number("pml.sigma_c");
  p.gamma = s.number("pml.gamma");
  p.x = s.number("series.x");
  p.g = named_signal(s.text("signal.name"));
  p.validate();
  return p;
}

Result cmd_cq_error(const Settings& s, const Common& c) {
  const ErrorSeriesParams p = series_params(s);
  const double dt = s.number("time.dt"), T = s.number("time.T"), every = s.number("output.every");
  if (!(T > 0.0)) throw ConfigError("time.T must be positive");
  const CQScheme sc{s.text("cq.kind") == "bdf2" ? CQKind::BDF2 : CQKind::Trapezoidal, dt,
                    static_cast<int>(std::lround(T / dt))};
  const std::vector<double> e = cq_invert(p, sc);
  const int stride = std::max(1, static_cast<int>(std::lround(every / dt)));
  std::vector<int> idx;
  for (int n = 0; n <= sc.n_steps; n += stride) idx.push_back(n);
  std::vector<double> series(idx.size());
  const double tol = s.number("series.tol");
  parallel_for(idx.size(), c.threads, [&](std::size_t i) { series[i] = error_series(p, idx[i] * dt, tol); });
  Result r{Table({"t", "series", "cq", "abs_diff"}), cli::PlotStyle::Lines, {}};
  for (std::size_t i = 0; i < idx.size(); ++i)
    r.table.add({idx[i] * dt, series[i], e[idx[i]], std::abs(series[i] - e[idx[i]])});
  return r;
}

Result cmd_sweep_sigma(const Settings& s, const Common& c) {
  const ErrorSeriesParams p = series_params(s);
  const auto pts = sigma_sweep(p, s.numbers("sweep.sigmas"), s.number("sweep.t"), p.x, c.threads);
  Result r{Table({"sigma_c", "abs_error"}), cli::PlotStyle::Lines, {}};
  for (const auto& pt : pts) r.table.add({pt.sigma_c, pt.abs_error});
  return r;
}

Result cmd_hardy_check(const Settings& s, const Common& c) {
  const bool one = s.text("basis.kind") == "one-pole";
  const int top = s.integer("basis.N");
  const double eta = s.number("basis.eta");
  if (top < 0) throw ConfigError("basis.N must be nonnegative");
  std::vector<std::vector<double>> rows(top + 1);
  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    const int n = static_cast<int>(i);
    HardyMatrices h;
    OracleMatrices o;
    if (one) {
      // basis.N is the highest Laguerre index M; the oracle covers indices up to 2(M/2)+1
      h = one_pole_matrices(n);
      o = quadrature_oracle(RadialBasisSpec::one_pole(n / 2));
      const int m = n + 1;
      o.mass = o.mass.topLeftCorner(m, m).eval();
      o.r_mass = o.r_mass.topLeftCorner(m, m).eval();
      o.r_deriv = o.r_deriv.topLeftCorner(m, m).eval();
      o.deriv = o.deriv.topLeftCorner(m, m).eval();
    } else {
      h = two_pole_matrices(eta, n);
      o = quadrature_oracle(RadialBasisSpec::two_pole(eta, n));
    }
    auto dev = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); };
    rows[i] = {static_cast<double>(n), dev(h.mass(), o.mass), dev(h.r_mass(), o.r_mass), dev(h.r_deriv(), o.r_deriv),
               dev(h.deriv(), o.deriv)};
  });
  Result r{Table({one ? "M" : "N", "mass", "r_mass", "r_deriv", "deriv"}), cli::PlotStyle::Lines, {}};
  const double tol = one ? 1e-10 : 1e-9;
  for (const auto& row : rows) {
    if (row[1] > tol || row[2] > tol || row[3] > tol || row[4] > tol)
      r.failure = "hardy: formula matrices deviate from the oracle beyond " + cli::format_number(tol);
    r.table.add(row);
  }
  return r;
}

struct Subcommand {
  std::string name, help;
  Schema schema;
  std::function<Result(const Settings&, const Common&)> run;
};

std::vector<Subcommand> subcommands() {
  const Schema series = pml_keys("0.2", "1", "1", "1") +
                        Schema{{"series.x", KeyType::Number, "0.1", {}},
                               {"signal.name", KeyType::Text, "bump", {"bump", "sine-burst", "zero"}}};
  return {
      {"stability-map", "classify points of the disk as stable or unstable",
       aniso_keys() + Schema{{"pml.R", KeyType::Number, "1", {}},
                             {"grid.n", KeyType::Integer, "101", {}},
                             {"grid.samples", KeyType::Integer, "256", {}}},
       cmd_stability_map},
      {"slowness", "slowness curve p^T A p = 1", aniso_keys() + Schema{{"grid.n", KeyType::Integer, "360", {}}},
       cmd_slowness},
      {"spectrum", "eigenvalues of the semi-discrete 1D system", system_keys(), cmd_spectrum},
      {"run-1d", "Crank-Nicolson run with energy trace",
       system_keys() + Schema{{"time.dt", KeyType::Number, "0.005", {}},
                              {"time.T", KeyType::Number, "10", {}},
                              {"signal.name", KeyType::Text, "auto", {"auto", "bump", "sine-burst", "gaussian-pulse", "zero"}},
                              {"output.stride", KeyType::Integer, "1", {}},
                              {"reference.enabled", KeyType::Flag, "false", {}}},
       cmd_run1d},
      {"cq-error", "layer error: series against convolution quadrature",
       series + Schema{{"time.dt", KeyType::Number, "0.001", {}},
                       {"time.T", KeyType::Number, "10", {}},
                       {"cq.kind", KeyType::Text, "bdf2", {"bdf2", "trapezoidal"}},
                       {"output.every", KeyType::Number, "0.01", {}},
                       {"series.tol", KeyType::Number, "1e-10", {}}},
       cmd_cq_error},
      {"sweep-sigma", "layer error at fixed sigma_c / gamma as sigma_c grows",
       series + Schema{{"sweep.sigmas", KeyType::NumberList, "0.1,0.3,1,3,10,30,100,300,1000", {}},
                       {"sweep.t", KeyType::Number, "10", {}}},
       cmd_sweep_sigma},
      {"hardy-check", "Hardy-space matrices against the quadrature oracle",
       Schema{{"basis.kind", KeyType::Text, "one-pole", {"one-pole", "two-pole"}},
              {"basis.N", KeyType::Integer, "21", {}},
              {"basis.eta", KeyType::Number, "20", {}}},
       cmd_hardy_check},
  };
}

int execute(const Subcommand& sub, const Common& c) {
  cli::Config cfg;
  if (!c.config.empty()) cfg = cli::Config::load(c.config);
  for (const auto& a : c.sets) cfg.set_assignment(a);
  const Settings settings(cfg, sub.schema);
  if (c.svg && c.out.empty()) throw ConfigError("--svg needs --out");
  if (c.threads < 1) throw ConfigError("--threads must be at least 1");

  const Result res = sub.run(settings, c);
  if (c.out.empty()) {
    cli::write_csv(res.table, std::cout);
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot write '" + c.out + "'");
    cli::write_csv(res.table, f);
    if (!f) throw std::ios_base::failure("write to '" + c.out + "' failed");
    if (c.svg) {
      const std::string path = std::filesystem::path(c.out).replace_extension(".svg").string();
      std::ofstream g(path, std::ios::binary);
      cli::write_svg(res.table, g, res.style);
      if (!g) throw std::ios_base::failure("write to '" + path + "' failed");
    }
  }
  if (!res.failure.empty()) {
    std::cerr << "radpml-cli: " << res.failure << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radpml-cli: batch drivers for the radial PML toolkit"};
  app.require_subcommand(1);
  const auto subs = subcommands();
  Common common;
  const Subcommand* chosen = nullptr;
  for (const auto& sub : subs) {
    CLI::App* sc = app.add_subcommand(sub.name, sub.help);
    sc->add_option("--config", common.config, "key = value configuration file");
    sc->add_option("--set", common.sets, "override one key, e.g. --set pml.sigma_c=20")->take_all();
    sc->add_option("--out", common.out, "CSV output path (stdout if omitted)");
    sc->add_flag("--svg", common.svg, "also write an SVG plot next to the CSV");
    sc->add_option("--threads", common.threads, "worker threads for sweeps");
    sc->add_option("--seed", common.seed, "seed for randomized drivers");
    std::string keys;
    for (const auto& k : sub.schema) keys += "\n  " + k.key + " = " + k.fallback;
    sc->footer("Config keys (defaults):" + keys);
    sc->callback([&chosen, &sub] { chosen = &sub; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return execute(*chosen, common);
  } catch (const ConfigError& e) {
    std::cerr << "radpml-cli: config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "radpml-cli: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "radpml-cli: NumericalFailure: " << e.what() << "\n";
    return 3;
  } catch (const BranchCut& e) {
    std::cerr << "radpml-cli: BranchCut: " << e.what() << "\n";
    return 3;
  } catch (const NoWitness& e) {
    std::cerr << "radpml-cli: NoWitness: " << e.what() << "\n";
    return 3;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "radpml-cli: I/O error: " << e.what() << "\n";
    return 1;
  }
}
