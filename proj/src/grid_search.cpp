#include "prodtest/grid_search.hpp"

#include "prodtest/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace prodtest::grid {

namespace {

// Positive root of x^{s+1} = x + 1; its inverse powers give a low-discrepancy
// Kronecker sequence in s dimensions.
double generalized_golden(int s) {
  double x = 2.0;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (s + 1));
  return x;
}

// Maps a point of the unit cube [0,1)^{2(d-1)} to a unit vector so that the
// uniform measure on the cube goes to the Haar measure on the sphere.
Vector cube_to_sphere(int d, const std::vector<double>& u) {
  Vector v(d);
  double rem = 1.0;
  for (int j = 0; j < d - 1; ++j) {
    const double b = 1.0 - std::pow(1.0 - u[static_cast<std::size_t>(j)], 1.0 / (d - 1 - j));
    const double p = b * rem;
    rem -= p;
    const double phase = j == 0 ? 0.0 : 2.0 * std::numbers::pi * u[static_cast<std::size_t>(d - 1 + j - 1)];
    v(j) = std::sqrt(std::max(0.0, p)) * std::polar(1.0, phase);
  }
  v(d - 1) = std::sqrt(std::max(0.0, rem)) * std::polar(1.0, 2.0 * std::numbers::pi * u.back());
  return v / v.norm();
}

struct Candidate {
  double value;
  std::vector<int> choice;
  bool operator<(const Candidate& o) const { return value > o.value; }  // min-heap on value
};

class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}
  void offer(double value, const std::vector<int>& choice) {
    if (heap_.size() < k_) {
      heap_.push({value, choice});
    } else if (value > heap_.top().value) {
      heap_.pop();
      heap_.push({value, choice});
    }
  }
  std::vector<Candidate> sorted() {
    std::vector<Candidate> out;
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t k_;
  std::priority_queue<Candidate> heap_;
};

std::vector<Vector> unpack(const std::vector<double>& x, const std::vector<int>& dims) {
  std::vector<Vector> locals;
  std::size_t pos = 0;
  for (int d : dims) {
    Vector v(d);
    for (int a = 0; a < d; ++a, pos += 2) v(a) = Complex(x[pos], x[pos + 1]);
    const double nrm = v.norm();
    if (nrm > 0) v /= nrm;
    locals.push_back(std::move(v));
  }
  return locals;
}

std::vector<double> pack(const std::vector<Vector>& locals) {
  std::vector<double> x;
  for (const auto& v : locals)
    for (Eigen::Index a = 0; a < v.size(); ++a) {
      x.push_back(v(a).real());
      x.push_back(v(a).imag());
    }
  return x;
}

Vector product_of(const std::vector<Vector>& locals) {
  Vector v = Vector::Ones(1);
  for (const auto& l : locals) {
    Vector next(v.size() * l.size());
    for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(a * l.size(), l.size()) = v(a) * l;
    v = std::move(next);
  }
  return v;
}

struct Mesh {
  std::vector<std::vector<Vector>> points;
  std::vector<double> radius;   // covering radius r_i per site
  double loss_amplitude = 0.0;  // sum_i sqrt(2 r_i)
};

// Overlap loss of the nearest mesh point to a maximizer. Writing each mesh
// vector as c_i phi_i + s_i phi_i^perp, terms with a single perp factor vanish
// at a maximizer, so |<psi|g>| >= a prod c - R with R the weight of all terms
// carrying two or more perp factors.
double overlap_mesh_loss(const std::vector<double>& radius) {
  double prod_c = 1.0, prod_cs = 1.0, first = 0.0;
  for (double r : radius) {
    const double c = std::sqrt(std::max(0.0, 1.0 - r));
    prod_c *= c;
    prod_cs *= c + std::sqrt(r);
  }
  for (std::size_t i = 0; i < radius.size(); ++i) {
    double t = std::sqrt(radius[i]);
    for (std::size_t j = 0; j < radius.size(); ++j)
      if (j != i) t *= std::sqrt(std::max(0.0, 1.0 - radius[j]));
    first += t;
  }
  const double rest = prod_cs - prod_c - first;
  const double amp = std::max(0.0, prod_c - rest);
  return 1.0 - amp * amp;
}

Mesh build_mesh(const std::vector<int>& dims, int resolution) {
  Mesh mesh;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    auto pts = quasi_uniform_points(dims[i], resolution);
    const double r = covering_radius(pts, dims[i], 2000, 7919 + i);
    mesh.loss_amplitude += std::sqrt(2.0 * r);
    mesh.radius.push_back(r);
    mesh.points.push_back(std::move(pts));
  }
  return mesh;
}

bool near_duplicate(const std::vector<int>& a, const std::vector<int>& b, const Mesh& mesh) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& pts = mesh.points[i];
    if (std::norm(pts[static_cast<std::size_t>(a[i])].dot(pts[static_cast<std::size_t>(b[i])])) < 0.9) return false;
  }
  return true;
}

Result refine(const Objective& f, const Mesh& mesh, std::vector<Candidate> top, std::size_t evaluations) {
  Result res;
  res.mesh_value = top.front().value;
  res.value = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> chosen;
  for (const auto& c : top) {
    if (chosen.size() >= 6) break;
    if (std::any_of(chosen.begin(), chosen.end(), [&](const auto& o) { return near_duplicate(c.choice, o, mesh); }))
      continue;
    chosen.push_back(c.choice);
    std::vector<Vector> locals;
    for (std::size_t i = 0; i < c.choice.size(); ++i) locals.push_back(mesh.points[i][static_cast<std::size_t>(c.choice[i])]);
    locals = compass_refine(f, std::move(locals), 0.25, 1e-10, evaluations);
    const double val = f(locals);
    ++evaluations;
    if (val > res.value) {
      res.value = val;
      res.locals = std::move(locals);
    }
  }
  res.evaluations = evaluations;
  return res;
}

}  // namespace

std::vector<Vector> quasi_uniform_points(int d, int count) {
  if (d < 1 || count < 1) throw Error(Errc::invalid_argument, "mesh needs d >= 1 and count >= 1");
  std::vector<Vector> pts;
  if (d == 1) {
    pts.push_back(Vector::Ones(1));
    return pts;
  }
  if (d == 2) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double phi = 2.0 * std::numbers::pi * std::fmod(i / golden, 1.0);
      Vector v(2);
      v(0) = std::sqrt((1.0 + z) / 2.0);
      v(1) = std::polar(std::sqrt((1.0 - z) / 2.0), phi);
      pts.push_back(std::move(v));
    }
    return pts;
  }
  const int s = 2 * (d - 1);
  const double g = generalized_golden(s);
  std::vector<double> alpha(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) alpha[static_cast<std::size_t>(j)] = std::fmod(std::pow(1.0 / g, j + 1), 1.0);
  std::vector<double> u(static_cast<std::size_t>(s));
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < s; ++j) u[static_cast<std::size_t>(j)] = std::fmod(0.5 + (i + 1) * alpha[static_cast<std::size_t>(j)], 1.0);
    Vector v = cube_to_sphere(d, u);
    canonicalize_phase(v);
    pts.push_back(std::move(v));
  }
  return pts;
}

double covering_radius(const std::vector<Vector>& mesh, int d, int probes, std::uint64_t seed) {
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    auto rng = substream(seed, static_cast<std::uint64_t>(p));
    const Vector probe = haar_vector(d, rng);
    double best = 0.0;
    for (const auto& g : mesh) best = std::max(best, std::norm(probe.dot(g)));
    worst = std::max(worst, 1.0 - best);
  }
  return worst;
}

std::vector<Vector> compass_refine(const Objective& f, std::vector<Vector> locals, double initial_step,
                                   double final_step, std::size_t& evaluations) {
  std::vector<int> dims;
  for (const auto& v : locals) dims.push_back(static_cast<int>(v.size()));
  std::vector<double> x = pack(locals);
  double best = f(unpack(x, dims));
  ++evaluations;
  double step = initial_step;
  const std::size_t cap = evaluations + 400000;
  while (step > final_step && evaluations < cap) {
    bool improved = false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (double dir : {1.0, -1.0}) {
        const double keep = x[k];
        x[k] = keep + dir * step;
        const double val = f(unpack(x, dims));
        ++evaluations;
        if (val > best) {
          best = val;
          improved = true;
          break;
        }
        x[k] = keep;
      }
    }
    if (!improved) step *= 0.5;
    // Keep every local block at unit scale so the step size stays meaningful.
    x = pack(unpack(x, dims));
  }
  return unpack(x, dims);
}

Result maximize_overlap(const Vector& psi, const std::vector<int>& dims, int resolution) {
  const Mesh mesh = build_mesh(dims, resolution);
  const std::size_t n = dims.size();
  TopK top(48);
  std::size_t evaluations = 0;
  std::vector<int> choice(n, 0);

  std::function<void(std::size_t, const Vector&)> rec = [&](std::size_t site, const Vector& partial) {
    const auto& pts = mesh.points[site];
    const auto d = static_cast<Eigen::Index>(dims[site]);
    const Eigen::Index rest = partial.size() / d;
    for (std::size_t g = 0; g < pts.size(); ++g) {
      choice[site] = static_cast<int>(g);
      Vector next = Vector::Zero(rest);
      for (Eigen::Index a = 0; a < d; ++a) next += std::conj(pts[g](a)) * partial.segment(a * rest, rest);
      if (site + 1 == n) {
        ++evaluations;
        top.offer(std::norm(next(0)), choice);
      } else {
        rec(site + 1, next);
      }
    }
  };
  rec(0, psi);

  const Objective f = [&](const std::vector<Vector>& locals) { return std::norm(product_of(locals).dot(psi)); };
  Result res = refine(f, mesh, top.sorted(), evaluations);
  res.mesh_loss = overlap_mesh_loss(mesh.radius);
  return res;
}

Result extremize_expectation(const Matrix& m, const std::vector<int>& dims, int resolution, double sign) {
  const Mesh mesh = build_mesh(dims, resolution);
  const std::size_t n = dims.size();
  TopK top(48);
  std::size_t evaluations = 0;
  std::vector<int> choice(n, 0);

  std::function<void(std::size_t, const Matrix&)> rec = [&](std::size_t site, const Matrix& partial) {
    const auto& pts = mesh.points[site];
    const auto d = static_cast<Eigen::Index>(dims[site]);
    const Eigen::Index rest = partial.rows() / d;
    for (std::size_t g = 0; g < pts.size(); ++g) {
      choice[site] = static_cast<int>(g);
      Matrix next = Matrix::Zero(rest, rest);
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
          next += std::conj(pts[g](a)) * pts[g](b) * partial.block(a * rest, b * rest, rest, rest);
      if (site + 1 == n) {
        ++evaluations;
        top.offer(sign * next(0, 0).real(), choice);
      } else {
        rec(site + 1, next);
      }
    }
  };
  rec(0, m);

  const Objective f = [&](const std::vector<Vector>& locals) {
    const Vector v = product_of(locals);
    return sign * v.dot(m * v).real();
  };
  Result res = refine(f, mesh, top.sorted(), evaluations);
  const double scale = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
  res.mesh_loss = 2.0 * mesh.loss_amplitude * scale;
  res.value *= sign;
  res.mesh_value *= sign;
  return res;
}

}  // namespace prodtest::grid
