#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "radpml/anisotropy.hpp"
#include "radpml/error.hpp"
#include "radpml/hardy.hpp"
#include "radpml/quadrature.hpp"
#include "radpml/scaling.hpp"
#include "radpml/signal.hpp"

namespace radpml {

enum class Region { Interior, Layer };
enum class Geometry { Radial, HalfLine };

struct Mesh1D {
  std::vector<double> nodes;
  int order = 1;
  std::vector<Region> tags;

  int n_elements() const { return static_cast<int>(nodes.size()) - 1; }

  void validate() const {
    require(order >= 1, "Mesh1D: order must be at least 1");
    require(nodes.size() >= 2, "Mesh1D: need at least one element");
    require(tags.size() + 1 == nodes.size(), "Mesh1D: one tag per element");
    for (std::size_t i = 1; i < nodes.size(); ++i)
      require(nodes[i] > nodes[i - 1], "Mesh1D: nodes must be strictly ascending");
  }

  // Uniform elements of size <= h on [x0, R] (interior) and [R, outer] (layer).
  static Mesh1D uniform(double x0, double radius, double outer, double h, int k) {
    require(h > 0.0, "Mesh1D: h must be positive");
    require(radius > x0 && outer >= radius, "Mesh1D: need x0 < R <= outer");
    Mesh1D m;
    m.order = k;
    const int n1 = std::max(1, static_cast<int>(std::ceil((radius - x0) / h - 1e-9)));
    for (int i = 0; i < n1; ++i) {
      m.nodes.push_back(x0 + (radius - x0) * i / n1);
      m.tags.push_back(Region::Interior);
    }
    m.nodes.push_back(radius);
    if (outer > radius) {
      const int n2 = std::max(1, static_cast<int>(std::ceil((outer - radius) / h - 1e-9)));
      for (int i = 1; i <= n2; ++i) {
        m.nodes.push_back(i == n2 ? outer : radius + (outer - radius) * i / n2);
        m.tags.push_back(Region::Layer);
      }
    }
    m.validate();
    return m;
  }
};

struct TruncatedPML {
  double width = 1.0;
};
struct MappedPML {
  double width = 1.0;
  int test_weight_power = 3;
};
struct InfiniteElement {
  RadialBasisSpec basis;
};
using ExteriorTreatment = std::variant<TruncatedPML, MappedPML, InfiniteElement>;

// Index bookkeeping for X = [u | v | w | p | q].
struct DofMap {
  std::vector<int> u_node;               // per mesh node, -1 where Dirichlet
  std::vector<int> v_node, w_node;       // per mesh node, -1 outside the layer
  std::vector<std::vector<int>> p_elem;  // per element, k entries
  std::vector<std::vector<int>> q_elem;  // per element, empty outside the layer
  std::vector<int> u_ext, v_ext, w_ext, p_ext, q_ext;
  int u_begin = 0, v_begin = 0, w_begin = 0, p_begin = 0, q_begin = 0, total = 0;
};

struct System {
  Geometry geometry = Geometry::Radial;
  double a = 1.0;
  ShiftedScaling scaling;
  Mesh1D mesh;
  ExteriorTreatment treatment;
  DofMap dofs;
  Eigen::SparseMatrix<double> M, K;
  // quadratic forms: X^T E X / 2 is the energy
  Eigen::SparseMatrix<double> energy_all, energy_interior;
  Signal boundary;  // Dirichlet data at x = 0 (half-line only)
  int boundary_dof = -1;

  int size() const { return dofs.total; }
};

struct Solver1DState {
  Eigen::VectorXd x;
  double t = 0.0;

  Eigen::VectorXd u(const System& s) const { return x.segment(s.dofs.u_begin, s.dofs.v_begin - s.dofs.u_begin); }
  Eigen::VectorXd v(const System& s) const { return x.segment(s.dofs.v_begin, s.dofs.w_begin - s.dofs.v_begin); }
  Eigen::VectorXd w(const System& s) const { return x.segment(s.dofs.w_begin, s.dofs.p_begin - s.dofs.w_begin); }
  Eigen::VectorXd p(const System& s) const { return x.segment(s.dofs.p_begin, s.dofs.q_begin - s.dofs.p_begin); }
  Eigen::VectorXd q(const System& s) const { return x.segment(s.dofs.q_begin, s.dofs.total - s.dofs.q_begin); }
};

struct TimeGrid {
  double dt = 1e-3;
  int n_steps = 0;
};

namespace detail {

// Values and derivatives of the Lagrange polynomials on `nodes` at x.
inline void lagrange(const std::vector<double>& nodes, double x, std::vector<double>& val, std::vector<double>& der) {
  const std::size_t n = nodes.size();
  val.assign(n, 0.0);
  der.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double li = 1.0, di = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double inv = 1.0 / (nodes[i] - nodes[j]);
      di = di * (x - nodes[j]) * inv + li * inv;
      li *= (x - nodes[j]) * inv;
    }
    val[i] = li;
    der[i] = di;
  }
}

struct Coefficients {
  double c1 = 0, c2 = 0, c3 = 0, sa = 0, sb = 0, ss = 0;
};

inline Coefficients coefficients(Geometry g, const ShiftedScaling& sc, double rho) {
  const double gam = sc.gamma;
  const double sig = sc.profile.sigma(rho);
  Coefficients c;
  if (g == Geometry::HalfLine) {
    c.c1 = sig;
    c.c2 = gam * sig;
    c.sa = sig;
    c.sb = gam;
    c.ss = 0.0;
    return c;
  }
  const double st = sc.profile.sigma_tilde(rho);
  c.c1 = sig + st;
  c.c2 = gam * (sig + st) - sig * st;
  c.c3 = gam * sig * st;
  c.sa = sig - st;
  c.sb = st + gam;
  c.ss = sig * st;
  return c;
}

class Triplets {
 public:
  void add(int i, int j, double v) {
    if (i >= 0 && j >= 0 && v != 0.0) t_.emplace_back(i, j, v);
  }
  Eigen::SparseMatrix<double> build(int n) const {
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(t_.begin(), t_.end());
    m.makeCompressed();
    return m;
  }

 private:
  std::vector<Eigen::Triplet<double>> t_;
};

inline System assemble(Geometry geom, double a, const ShiftedScaling& sc, const Mesh1D& mesh,
                       const ExteriorTreatment& tr) {
  mesh.validate();
  require(a > 0.0, "assemble: material coefficient must be positive");
  const double R = sc.profile.radius_pml;
  const int k = mesh.order;
  const int ne = mesh.n_elements();
  const int nn = ne * k + 1;
  const bool ie = std::holds_alternative<InfiniteElement>(tr);
  const bool mapped = std::holds_alternative<MappedPML>(tr);
  const bool aux = sc.profile.sigma_c > 0.0;
  const bool has_w = geom == Geometry::Radial;
  if (geom == Geometry::Radial) require(mesh.nodes.front() == 0.0, "assemble: radial mesh must start at r = 0");

  bool has_layer = false;
  for (int e = 0; e < ne; ++e) {
    if (mesh.tags[e] != Region::Layer) continue;
    has_layer = true;
    require(mesh.nodes[e] >= R - 1e-12, "assemble: layer element inside r < R");
  }
  for (int e = 0; e < ne; ++e)
    if (mesh.tags[e] == Region::Interior) require(mesh.nodes[e + 1] <= R + 1e-12, "assemble: interior element beyond R");

  std::optional<MappedLayer> layer;
  if (ie) {
    require(!has_layer, "assemble: infinite elements need a mesh without layer elements");
    require(std::abs(mesh.nodes.back() - R) < 1e-12, "assemble: infinite elements attach at r = R");
    std::get<InfiniteElement>(tr).basis.validate();
  } else {
    const double L = mapped ? std::get<MappedPML>(tr).width : std::get<TruncatedPML>(tr).width;
    require(L >= 0.0, "assemble: layer width must be nonnegative");
    require(std::abs(mesh.nodes.back() - (R + L)) < 1e-9, "assemble: mesh must end at R + L");
    if (mapped) {
      require(std::get<MappedPML>(tr).test_weight_power == 3, "assemble: only the cubic test weight is supported");
      require(L > 0.0 && has_layer, "assemble: mapped layer needs layer elements");
      layer = MappedLayer(R, L);
    }
  }

  System sys;
  sys.geometry = geom;
  sys.a = a;
  sys.scaling = sc;
  sys.mesh = mesh;
  sys.treatment = tr;
  DofMap& d = sys.dofs;

  int next = 0;
  d.u_node.assign(nn, -1);
  for (int j = 0; j < nn; ++j)
    if (ie || j != nn - 1) d.u_node[j] = next++;
  int n_ext = 0;
  if (ie) {
    n_ext = std::get<InfiniteElement>(tr).basis.dimension();
    d.u_ext.push_back(d.u_node[nn - 1]);
    for (int n = 1; n < n_ext; ++n) d.u_ext.push_back(next++);
  }
  d.v_begin = next;
  d.v_node.assign(nn, -1);
  d.w_node.assign(nn, -1);
  auto layer_nodes = [&](std::vector<int>& idx) {
    if (!aux) return;
    for (int e = 0; e < ne; ++e) {
      if (mesh.tags[e] != Region::Layer) continue;
      for (int i = 0; i <= k; ++i)
        if (idx[e * k + i] < 0) idx[e * k + i] = next++;
    }
  };
  auto ext_block = [&](std::vector<int>& idx) {
    for (int n = 0; n < n_ext; ++n) idx.push_back(next++);
  };
  layer_nodes(d.v_node);
  if (ie && aux) ext_block(d.v_ext);
  d.w_begin = next;
  if (has_w) {
    layer_nodes(d.w_node);
    if (ie && aux) ext_block(d.w_ext);
  }
  d.p_begin = next;
  d.p_elem.resize(ne);
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < k; ++i) d.p_elem[e].push_back(next++);
  if (ie) ext_block(d.p_ext);
  d.q_begin = next;
  d.q_elem.resize(ne);
  if (aux)
    for (int e = 0; e < ne; ++e)
      if (mesh.tags[e] == Region::Layer)
        for (int i = 0; i < k; ++i) d.q_elem[e].push_back(next++);
  if (ie && aux) ext_block(d.q_ext);
  d.total = next;

  const Rule lob = gauss_lobatto(k + 1);
  const Rule gl = k >= 1 ? gauss_legendre(k) : Rule{};
  const Rule quad = gauss_legendre(k + 6);
  Triplets tm, tk, te, ti;
  std::vector<double> phv, phd, psv, psd;

  for (int e = 0; e < ne; ++e) {
    const double xa = mesh.nodes[e], xb = mesh.nodes[e + 1];
    const double jx = 0.5 * (xb - xa);
    const bool in_layer = mesh.tags[e] == Region::Layer;
    const bool lay_aux = in_layer && aux;
    const bool interior = !in_layer;
    auto U = [&](int i) { return d.u_node[e * k + i]; };
    auto V = [&](int i) { return d.v_node[e * k + i]; };
    auto W = [&](int i) { return d.w_node[e * k + i]; };
    auto P = [&](int i) { return d.p_elem[e][i]; };
    auto Q = [&](int i) { return lay_aux ? d.q_elem[e][i] : -1; };

    for (std::size_t iq = 0; iq < quad.x.size(); ++iq) {
      const double xi = quad.x[iq];
      const double r = xa + jx * (xi + 1.0);
      const double dr = quad.w[iq] * jx;
      detail::lagrange(lob.x, xi, phv, phd);
      detail::lagrange(gl.x, xi, psv, psd);
      for (auto& v : phd) v /= jx;

      double rho = r, jac = 1.0, tw = 1.0, twp = 0.0;
      if (layer && in_layer) {
        rho = layer->map(r);
        jac = layer->derivative(r);
        const double del = R + layer->width - r;
        tw = del * del * del;
        twp = -3.0 * del * del;
      }
      const double mw = geom == Geometry::Radial ? rho : 1.0;
      const double w0 = mw * jac * tw * dr;
      const double wd = mw * tw * dr;
      const double wt = mw * twp * dr;
      const Coefficients c = lay_aux ? coefficients(geom, sc, rho) : Coefficients{};

      for (int i = 0; i <= k; ++i) {
        for (int j = 0; j <= k; ++j) {
          const double mm = w0 * phv[i] * phv[j];
          tm.add(U(i), U(j), mm);
          te.add(U(i), U(j), mm);
          if (interior) ti.add(U(i), U(j), mm);
          if (lay_aux) {
            tk.add(U(i), U(j), -c.c1 * mm);
            tk.add(U(i), V(j), c.c2 * mm);
            if (has_w) tk.add(U(i), W(j), c.c3 * mm);
            tm.add(V(i), V(j), mm);
            tk.add(V(i), U(j), mm);
            tk.add(V(i), V(j), -sc.gamma * mm);
            te.add(V(i), V(j), c.ss * mm);
            if (has_w) {
              tm.add(W(i), W(j), mm);
              tk.add(W(i), V(j), mm);
              tk.add(W(i), W(j), -sc.gamma * mm);
            }
          }
        }
        for (int j = 0; j < k; ++j) {
          tk.add(U(i), P(j), -(wd * phd[i] + wt * phv[i]) * psv[j]);
          tk.add(P(j), U(i), wd * psv[j] * phd[i]);
        }
      }
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          const double mm = w0 * psv[i] * psv[j];
          tm.add(P(i), P(j), mm / a);
          te.add(P(i), P(j), mm / a);
          if (interior) ti.add(P(i), P(j), mm / a);
          if (lay_aux) {
            tk.add(P(i), P(j), -c.sa / a * mm);
            tk.add(P(i), Q(j), c.sa / a * mm);
            tm.add(Q(i), Q(j), mm);
            tk.add(Q(i), P(j), c.sb * mm);
            tk.add(Q(i), Q(j), -c.sb * mm);
          }
        }
      }
    }
  }

  if (ie) {
    const HardyMatrices hm = hardy_matrices(std::get<InfiniteElement>(tr).basis);
    const Eigen::MatrixXd m0 = hm.mass();
    const double X = R - 1.0;
    Eigen::MatrixXd mr, dr;
    if (geom == Geometry::Radial) {
      mr = hm.r_mass() + X * m0;
      dr = hm.r_deriv() + X * hm.deriv();
    } else {
      mr = m0;
      dr = hm.deriv();
    }
    const double sg = sc.profile.sigma_c, gam = sc.gamma;
    // integral of (alpha r + beta) phi_i phi_j over r > R (radial), or coef * mass (half-line)
    auto cm = [&](double alpha, double beta, double flat) -> Eigen::MatrixXd {
      if (geom == Geometry::Radial) return alpha * mr + beta * m0;
      return flat * m0;
    };
    const Eigen::MatrixXd c1 = cm(2 * sg, -sg * R, sg);
    const Eigen::MatrixXd c2 = cm(2 * gam * sg - sg * sg, -gam * sg * R + sg * sg * R, gam * sg);
    const Eigen::MatrixXd c3 = cm(gam * sg * sg, -gam * sg * sg * R, 0.0);
    const Eigen::MatrixXd csa = cm(0.0, sg * R, sg);
    const Eigen::MatrixXd csb = cm(sg + gam, -sg * R, gam);
    const Eigen::MatrixXd css = cm(sg * sg, -sg * sg * R, 0.0);
    for (int i = 0; i < n_ext; ++i) {
      for (int j = 0; j < n_ext; ++j) {
        const int ui = d.u_ext[i], uj = d.u_ext[j], pi = d.p_ext[i], pj = d.p_ext[j];
        tm.add(ui, uj, mr(i, j));
        te.add(ui, uj, mr(i, j));
        tk.add(ui, pj, -dr(i, j));
        tk.add(pi, uj, dr(j, i));
        tm.add(pi, pj, mr(i, j) / a);
        te.add(pi, pj, mr(i, j) / a);
        if (!aux) continue;
        const int vi = d.v_ext[i], vj = d.v_ext[j], qi = d.q_ext[i], qj = d.q_ext[j];
        tk.add(ui, uj, -c1(i, j));
        tk.add(ui, vj, c2(i, j));
        tm.add(vi, vj, mr(i, j));
        tk.add(vi, uj, mr(i, j));
        tk.add(vi, vj, -gam * mr(i, j));
        te.add(vi, vj, css(i, j));
        if (has_w) {
          const int wi = d.w_ext[i], wj = d.w_ext[j];
          tk.add(ui, wj, c3(i, j));
          tm.add(wi, wj, mr(i, j));
          tk.add(wi, vj, mr(i, j));
          tk.add(wi, wj, -gam * mr(i, j));
        }
        tk.add(pi, pj, -csa(i, j) / a);
        tk.add(pi, qj, csa(i, j) / a);
        tm.add(qi, qj, mr(i, j));
        tk.add(qi, pj, csb(i, j));
        tk.add(qi, qj, -csb(i, j));
      }
    }
  }

  sys.M = tm.build(d.total);
  sys.K = tk.build(d.total);
  sys.energy_all = te.build(d.total);
  sys.energy_interior = ti.build(d.total);
  return sys;
}

}  // namespace detail

inline System assemble_radial_system(double a, const ShiftedScaling& sc, const Mesh1D& mesh,
                                     const ExteriorTreatment& tr) {
  return detail::assemble(Geometry::Radial, a, sc, mesh, tr);
}

inline System assemble_radial_system(const Anisotropy& an, const ShiftedScaling& sc, const Mesh1D& mesh,
                                     const ExteriorTreatment& tr) {
  require(an.is_isotropic(1e-14), "assemble_radial_system: the radial reduction needs an isotropic material");
  return detail::assemble(Geometry::Radial, an.a(0, 0), sc, mesh, tr);
}

// 1D wave equation on x > 0 with Dirichlet data g at x = 0, imposed by replacing the
// row of the boundary unknown with du0/dt = g'.
inline System assemble_halfline_system(const ShiftedScaling& sc, const Mesh1D& mesh, const ExteriorTreatment& tr,
                                       Signal g) {
  if (!g) throw InvalidInput("assemble_halfline_system: boundary signal missing");
  require(mesh.nodes.front() == 0.0, "assemble_halfline_system: mesh must start at x = 0");
  System sys = detail::assemble(Geometry::HalfLine, 1.0, sc, mesh, tr);
  const int b = sys.dofs.u_node[0];
  auto zero_row = [b](Eigen::SparseMatrix<double>& m) {
    for (int c = 0; c < m.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
        if (it.row() == b) it.valueRef() = 0.0;
  };
  zero_row(sys.M);
  zero_row(sys.K);
  sys.M.coeffRef(b, b) = 1.0;
  sys.M.prune(0.0);
  sys.K.prune(0.0);
  sys.boundary = std::move(g);
  sys.boundary_dof = b;
  return sys;
}

inline Solver1DState zero_state(const System& sys) {
  return {Eigen::VectorXd::Zero(sys.size()), 0.0};
}

// Nodal interpolation of u0 on the mesh part of the u space; exterior coefficients stay 0.
inline Solver1DState initial_state(const System& sys, const std::function<double(double)>& u0) {
  Solver1DState s = zero_state(sys);
  const int k = sys.mesh.order;
  const Rule lob = gauss_lobatto(k + 1);
  for (int e = 0; e < sys.mesh.n_elements(); ++e) {
    const double xa = sys.mesh.nodes[e], xb = sys.mesh.nodes[e + 1];
    for (int i = 0; i <= k; ++i) {
      const int id = sys.dofs.u_node[e * k + i];
      if (id < 0) continue;
      double r = xa + 0.5 * (xb - xa) * (lob.x[i] + 1.0);
      if (const auto* mp = std::get_if<MappedPML>(&sys.treatment); mp && sys.mesh.tags[e] == Region::Layer)
        r = MappedLayer(sys.scaling.profile.radius_pml, mp->width).map(r);
      s.x[id] = u0(r);
    }
  }
  return s;
}

// Load vector of a spatial profile over the interior elements, weighted like the u-mass.
inline Eigen::VectorXd load_vector(const System& sys, const std::function<double(double)>& space) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(sys.size());
  const int k = sys.mesh.order;
  const Rule lob = gauss_lobatto(k + 1);
  const Rule quad = gauss_legendre(k + 12);
  std::vector<double> val, der;
  for (int e = 0; e < sys.mesh.n_elements(); ++e) {
    if (sys.mesh.tags[e] != Region::Interior) continue;
    const double xa = sys.mesh.nodes[e], jx = 0.5 * (sys.mesh.nodes[e + 1] - xa);
    for (std::size_t iq = 0; iq < quad.x.size(); ++iq) {
      const double r = xa + jx * (quad.x[iq] + 1.0);
      const double wq = quad.w[iq] * jx * (sys.geometry == Geometry::Radial ? r : 1.0) * space(r);
      detail::lagrange(lob.x, quad.x[iq], val, der);
      for (int i = 0; i <= k; ++i) {
        const int id = sys.dofs.u_node[e * k + i];
        if (id >= 0) f[id] += wq * val[i];
      }
    }
  }
  return f;
}

// Sparse evaluation operator: (S X)_j = u(points[j]) for points inside the meshed region.
inline Eigen::SparseMatrix<double> interpolation_matrix(const System& sys, const std::vector<double>& points) {
  const auto& nd = sys.mesh.nodes;
  const int k = sys.mesh.order;
  const Rule lob = gauss_lobatto(k + 1);
  std::vector<Eigen::Triplet<double>> t;
  std::vector<double> val, der;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double x = points[j];
    require(x >= nd.front() && x <= nd.back(), "interpolation_matrix: point outside the mesh");
    int e = static_cast<int>(std::upper_bound(nd.begin(), nd.end(), x) - nd.begin()) - 1;
    e = std::clamp(e, 0, sys.mesh.n_elements() - 1);
    const double jx = 0.5 * (nd[e + 1] - nd[e]);
    detail::lagrange(lob.x, (x - nd[e]) / jx - 1.0, val, der);
    for (int i = 0; i <= k; ++i) {
      const int id = sys.dofs.u_node[e * k + i];
      if (id >= 0 && val[i] != 0.0) t.emplace_back(static_cast<int>(j), id, val[i]);
    }
  }
  Eigen::SparseMatrix<double> s(static_cast<int>(points.size()), sys.size());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

// Gauss points and weights (including the r-measure in the radial case) over [lo, hi],
// for space-time error norms.
inline Rule error_rule(const System& sys, double lo, double hi, int panels, int per_panel) {
  const Rule g = gauss_legendre(per_panel);
  Rule out;
  const double hp = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double x = lo + hp * (p + 0.5 * (g.x[i] + 1.0));
      out.x.push_back(x);
      out.w.push_back(0.5 * hp * g.w[i] * (sys.geometry == Geometry::Radial ? x : 1.0));
    }
  return out;
}

// Crank-Nicolson with the stepping matrix factorized once.
class CrankNicolson {
 public:
  CrankNicolson(const System& sys, double dt) : sys_(sys), dt_(dt) {
    require(dt > 0.0, "CrankNicolson: dt must be positive");
    Eigen::SparseMatrix<double> lhs = sys.M - 0.5 * dt * sys.K;
    rhs_ = sys.M + 0.5 * dt * sys.K;
    lhs.makeCompressed();
    lu_.analyzePattern(lhs);
    lu_.factorize(lhs);
    if (lu_.info() != Eigen::Success) throw NumericalFailure("step_crank_nicolson: singular stepping matrix");
  }

  void set_source(const Source& src) {
    source_time_ = src.time;
    source_vec_ = load_vector(sys_, src.space);
  }

  double dt() const { return dt_; }

  void step(Solver1DState& st) const {
    Eigen::VectorXd b = rhs_ * st.x;
    const double t0 = st.t, t1 = st.t + dt_;
    if (source_time_) b += dt_ * source_time_(0.5 * (t0 + t1)) * source_vec_;
    if (sys_.boundary_dof >= 0) b[sys_.boundary_dof] += sys_.boundary(t1) - sys_.boundary(t0);
    st.x = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw NumericalFailure("step_crank_nicolson: solve failed");
    st.t = t1;
  }

 private:
  const System& sys_;
  double dt_;
  Eigen::SparseMatrix<double> rhs_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Signal source_time_;
  Eigen::VectorXd source_vec_;
};

inline Solver1DState step_crank_nicolson(const System& sys, const Solver1DState& state, double dt) {
  Solver1DState out = state;
  CrankNicolson(sys, dt).step(out);
  return out;
}

enum class EnergyKind { Full, Interior };

// E = (||u||^2 + ||sqrt(sigma sigma~) v||^2 + ||p||^2_{1/a}) / 2 in the first-order
// variables (u is the field, v its time integral inside the layer); Interior keeps
// only the undamped elements and drops the sigma term.
inline double energy(const Solver1DState& st, const System& sys, EnergyKind kind = EnergyKind::Full) {
  const auto& e = kind == EnergyKind::Full ? sys.energy_all : sys.energy_interior;
  return 0.5 * st.x.dot(e * st.x);
}

struct SpectrumResult {
  std::vector<std::complex<double>> eigenvalues;  // ascending real part
  double max_residual = 0.0;                       // max ||(sM - K)x|| / ||x||
  bool defective = false;
};

inline SpectrumResult discrete_spectrum(const System& sys, bool with_residuals = true) {
  require(sys.size() <= 4000, "discrete_spectrum: dimension above 4000");
  const Eigen::MatrixXd md(sys.M), kd(sys.K);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(md);
  const Eigen::MatrixXd c = lu.solve(kd);
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, with_residuals);
  if (es.info() != Eigen::Success) throw NumericalFailure("discrete_spectrum: eigensolver did not converge");
  SpectrumResult out;
  const Eigen::VectorXcd ev = es.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  if (with_residuals) {
    const Eigen::MatrixXcd vecs = es.eigenvectors();
    const Eigen::SparseMatrix<std::complex<double>> mc = sys.M.cast<std::complex<double>>();
    const Eigen::SparseMatrix<std::complex<double>> kc = sys.K.cast<std::complex<double>>();
    const Eigen::MatrixXcd mv = mc * vecs, kv = kc * vecs;
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
      const double res = (ev[j] * mv.col(j) - kv.col(j)).norm() / vecs.col(j).norm();
      out.max_residual = std::max(out.max_residual, res);
    }
    out.defective = out.max_residual > 1e-8;
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](auto x, auto y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); });
  return out;
}

}  // namespace radpml
