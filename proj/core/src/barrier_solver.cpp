#include "barrier_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ehtx/errors.hpp"

namespace ehtx::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStallDecrement = 1e-6;

class Barrier {
 public:
  explicit Barrier(const BarrierProblem& p) : p_(p), N_(static_cast<int>(p.frames.size())) {
    ia_.assign(N_, -1);
    ib_.assign(N_, -1);
    for (int i = 0; i < N_; ++i) {
      const FrameTerm& f = p_.frames[i];
      if (f.has_a) {
        ia_[i] = n_;
        owner_.push_back(i);
        coef_.push_back(f.qa);
        ++n_;
      }
      if (f.has_b) {
        ib_[i] = n_;
        owner_.push_back(i);
        coef_.push_back(f.qb);
        ++n_;
      }
    }
    finite_B_ = std::isfinite(p_.B);
    count_terms();
  }

  int dim() const { return n_; }
  int terms() const { return m_; }

  Eigen::VectorXd start() const {
    Eigen::VectorXd z(n_);
    const bool warm = p_.start_a.size() == static_cast<std::size_t>(N_) &&
                      p_.start_b.size() == static_cast<std::size_t>(N_);
    for (int i = 0; i < N_; ++i) {
      const FrameTerm& f = p_.frames[i];
      if (ia_[i] >= 0) z[ia_[i]] = warm ? p_.start_a[i] : f.a_lo;
      if (ib_[i] >= 0) z[ib_[i]] = warm ? p_.start_b[i] : f.b_lo;
    }
    return z;
  }

  double a(const Eigen::VectorXd& z, int i) const { return ia_[i] >= 0 ? z[ia_[i]] : p_.frames[i].a_fixed; }
  double b(const Eigen::VectorXd& z, int i) const { return ib_[i] >= 0 ? z[ib_[i]] : p_.frames[i].b_fixed; }

  /// Barrier objective; +inf outside the relaxed interior.
  double value(const Eigen::VectorXd& z, double t, double* raw_objective = nullptr) const {
    const double r = p_.relax;
    double F = 0.0, obj = 0.0;
    double level = p_.B0;
    auto add_log = [&](double s) {
      if (!(s > 0.0)) return false;
      F -= std::log(s);
      return true;
    };
    for (int i = 0; i < N_; ++i) {
      const FrameTerm& f = p_.frames[i];
      const double ai = a(z, i), bi = b(z, i);
      if (ia_[i] >= 0) {
        if (!add_log(ai - f.a_lo + r)) return kInf;
        if (std::isfinite(f.a_hi) && !add_log(f.a_hi - ai)) return kInf;
      }
      if (ib_[i] >= 0) {
        if (!add_log(bi - f.b_lo + r)) return kInf;
        if (std::isfinite(f.b_hi) && !add_log(f.b_hi - bi)) return kInf;
      }
      if (f.has_couple && !add_log(f.couple_rhs + r - bi - f.couple_a * ai)) return kInf;
      if (f.transmits) {
        const EnergyEval e = f.energy(ai, bi);
        if (!add_log(e.E + r)) return kInf;
        const double arg = 1.0 + f.snr * e.E;
        if (!(arg > 0.0)) return kInf;
        obj += f.weight * std::log(arg);
      }
      if (finite_B_ && f.mid_a > 0.0 && !add_log(p_.B - level - f.mid_a * ai + r)) return kInf;
      level += f.q0 + f.qa * ai + f.qb * bi;
      if (!add_log(level + r)) return kInf;
      if (finite_B_ && !add_log(p_.B - level + r)) return kInf;
    }
    if (raw_objective) *raw_objective = obj;
    return F - t * obj;
  }

  void derivatives(const Eigen::VectorXd& z, double t, Eigen::VectorXd& g, Eigen::MatrixXd* Hp) const {
    Eigen::MatrixXd scratch;
    Eigen::MatrixXd& H = Hp ? *Hp : scratch;
    const bool want_h = Hp != nullptr;
    const double r = p_.relax;
    g.setZero(n_);
    if (want_h) H.setZero(n_, n_);
    std::vector<double> W(N_, 0.0), G(N_, 0.0), M(N_, 0.0), Gm(N_, 0.0);
    double level = p_.B0;
    for (int i = 0; i < N_; ++i) {
      const FrameTerm& f = p_.frames[i];
      const double ai = a(z, i), bi = b(z, i);
      const int ja = ia_[i], jb = ib_[i];
      // Local 2x2 block over (a, b); absent variables are skipped on scatter.
      double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
      if (ja >= 0) {
        const double s1 = ai - f.a_lo + r;
        ga -= 1.0 / s1;
        haa += 1.0 / (s1 * s1);
        if (std::isfinite(f.a_hi)) {
          const double s2 = f.a_hi - ai;
          ga += 1.0 / s2;
          haa += 1.0 / (s2 * s2);
        }
      }
      if (jb >= 0) {
        const double s1 = bi - f.b_lo + r;
        gb -= 1.0 / s1;
        hbb += 1.0 / (s1 * s1);
        if (std::isfinite(f.b_hi)) {
          const double s2 = f.b_hi - bi;
          gb += 1.0 / s2;
          hbb += 1.0 / (s2 * s2);
        }
      }
      if (f.has_couple) {
        const double s = f.couple_rhs + r - bi - f.couple_a * ai;
        const double ca = f.couple_a;
        ga += ca / s;
        gb += 1.0 / s;
        haa += ca * ca / (s * s);
        hab += ca / (s * s);
        hbb += 1.0 / (s * s);
      }
      if (f.transmits) {
        const EnergyEval e = f.energy(ai, bi);
        const double s = e.E + r;
        ga -= e.ga / s;
        gb -= e.gb / s;
        haa += e.ga * e.ga / (s * s) - e.haa / s;
        hab += e.ga * e.gb / (s * s) - e.hab / s;
        hbb += e.gb * e.gb / (s * s) - e.hbb / s;
        const double arg = 1.0 + f.snr * e.E;
        const double c1 = t * f.weight * f.snr / arg;
        const double c2 = t * f.weight * f.snr * f.snr / (arg * arg);
        ga -= c1 * e.ga;
        gb -= c1 * e.gb;
        haa += c2 * e.ga * e.ga - c1 * e.haa;
        hab += c2 * e.ga * e.gb - c1 * e.hab;
        hbb += c2 * e.gb * e.gb - c1 * e.hbb;
      }
      if (ja >= 0) g[ja] += ga;
      if (jb >= 0) g[jb] += gb;
      if (want_h && ja >= 0) H(ja, ja) += haa;
      if (want_h && jb >= 0) H(jb, jb) += hbb;
      if (want_h && ja >= 0 && jb >= 0) {
        H(ja, jb) += hab;
        H(jb, ja) += hab;
      }

      if (finite_B_ && f.mid_a > 0.0) {
        const double s = p_.B - level - f.mid_a * ai + r;
        M[i] = 1.0 / (s * s);
        Gm[i] = 1.0 / s;
      }
      level += f.q0 + f.qa * ai + f.qb * bi;
      const double sc = level + r;
      W[i] = 1.0 / (sc * sc);
      G[i] = -1.0 / sc;
      if (finite_B_) {
        const double sk = p_.B - level + r;
        W[i] += 1.0 / (sk * sk);
        G[i] += 1.0 / sk;
      }
    }

    // Suffix sums: SW/SG over i >= m, SM/SGm over i > m.
    std::vector<double> SW(N_ + 1, 0.0), SG(N_ + 1, 0.0), SM(N_ + 1, 0.0), SGm(N_ + 1, 0.0);
    for (int i = N_ - 1; i >= 0; --i) {
      SW[i] = SW[i + 1] + W[i];
      SG[i] = SG[i + 1] + G[i];
      SM[i] = SM[i + 1] + (i + 1 < N_ ? M[i + 1] : 0.0);
      SGm[i] = SGm[i + 1] + (i + 1 < N_ ? Gm[i + 1] : 0.0);
    }
    for (int v = 0; v < n_; ++v) {
      const int fv = owner_[v];
      g[v] += coef_[v] * (SG[fv] + SGm[fv]);
      if (!want_h) continue;
      for (int w = v; w < n_; ++w) {
        const int mx = std::max(fv, owner_[w]);
        const double h = coef_[v] * coef_[w] * (SW[mx] + SM[mx]);
        H(v, w) += h;
        if (w != v) H(w, v) += h;
      }
    }
    for (int i = 0; i < N_; ++i) {
      if (M[i] == 0.0 || ia_[i] < 0) continue;
      const int ra = ia_[i];
      const double ma = p_.frames[i].mid_a;
      g[ra] += ma * Gm[i];
      if (!want_h) continue;
      H(ra, ra) += ma * ma * M[i];
      for (int v = 0; v < n_ && owner_[v] < i; ++v) {
        const double h = ma * coef_[v] * M[i];
        H(ra, v) += h;
        H(v, ra) += h;
      }
    }
  }

 private:
  void count_terms() {
    m_ = 0;
    for (const FrameTerm& f : p_.frames) {
      if (f.has_a) m_ += 1 + (std::isfinite(f.a_hi) ? 1 : 0);
      if (f.has_b) m_ += 1 + (std::isfinite(f.b_hi) ? 1 : 0);
      if (f.has_couple) ++m_;
      if (f.transmits) ++m_;
      if (finite_B_ && f.mid_a > 0.0) ++m_;
      m_ += finite_B_ ? 2 : 1;
    }
  }

  const BarrierProblem& p_;
  int N_;
  int n_ = 0;
  int m_ = 0;
  bool finite_B_ = false;
  std::vector<int> ia_, ib_, owner_;
  std::vector<double> coef_;
};

double objective_scale(const BarrierProblem& prob) {
  if (!(prob.energy_scale > 0.0)) return 1.0;
  double ref = 0.0;
  for (const FrameTerm& f : prob.frames)
    if (f.transmits) ref += f.weight * std::log1p(f.snr * prob.energy_scale);
  return ref > 0.0 ? 1.0 / ref : 1.0;
}

}  // namespace

BarrierResult solve_barrier(const BarrierProblem& input, const BarrierSettings& settings) {
  const double scale = objective_scale(input);
  BarrierProblem prob = input;
  for (FrameTerm& f : prob.frames) f.weight *= scale;
  Barrier bar(prob);
  const int n = bar.dim();
  Eigen::VectorXd z = bar.start();
  BarrierResult res;
  double t = settings.t0;

  if (!std::isfinite(bar.value(z, t))) throw SolverError("barrier: starting point is not interior");

  Eigen::VectorXd g(n), gl(n);
  Eigen::MatrixXd H(n, n);
  while (n > 0) {
    ++res.outer_iterations;
    int steps = 0;
    int stalled = 0;
    double prev_dec = std::numeric_limits<double>::infinity();
    for (;; ++steps) {
      if (steps >= settings.max_newton_per_outer) {
        std::ostringstream os;
        os << "barrier: Newton did not converge at t=" << t << " (gap " << bar.terms() / t << ")";
        throw SolverError(os.str());
      }
      bar.derivatives(z, t, g, &H);
      Eigen::LLT<Eigen::MatrixXd> llt(H);
      Eigen::VectorXd dz;
      if (llt.info() == Eigen::Success) {
        dz = llt.solve(-g);
      } else {
        Eigen::MatrixXd Hr = H;
        Hr.diagonal().array() += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
        dz = Hr.ldlt().solve(-g);
      }
      const double dec = -g.dot(dz);
      if (!std::isfinite(dec)) throw SolverError("barrier: non-finite Newton step");
      ++res.newton_steps;
      if (dec * 0.5 <= settings.newton_tol) break;
      // Step selection uses the directional derivative rather than barrier
      // values: at large t the values are too large to resolve decreases of
      // this size. The barrier is convex along the ray, so the derivative is
      // increasing in the step.
      bool moved = false;
      double hi = 1.0;
      for (int ls = 0; ls < 80 && !std::isfinite(bar.value(z + hi * dz, t)); ++ls) hi *= 0.5;
      if (std::isfinite(bar.value(z + hi * dz, t))) {
        auto slope = [&](double s) {
          bar.derivatives(z + s * dz, t, gl, nullptr);
          return gl.dot(dz);
        };
        double step = hi;
        const double end_slope = slope(hi);
        if (end_slope > 0.0) {
          // Secant root of the slope, refined by bisection when the slope is
          // far from linear along the ray.
          step = hi * dec / (dec + end_slope);
          double mid_slope = slope(step);
          double lo = 0.0;
          for (int it = 0; it < 40 && std::abs(mid_slope) > 0.1 * dec; ++it) {
            (mid_slope > 0.0 ? hi : lo) = step;
            step = 0.5 * (lo + hi);
            mid_slope = slope(step);
          }
        }
        z += step * dz;
        moved = step > 0.0;
      }
      if (!moved) break;  // no further progress at this precision
      // Stagnating decrement: the Newton system is at its precision floor.
      stalled = (dec < kStallDecrement && dec > 0.9 * prev_dec) ? stalled + 1 : 0;
      prev_dec = dec;
      if (stalled >= 5) break;
    }
    res.gap = bar.terms() / t;
    if (res.gap <= settings.gap_tol) break;
    t *= settings.mu;
  }

  res.a.resize(prob.frames.size());
  res.b.resize(prob.frames.size());
  res.interior_a.resize(prob.frames.size());
  res.interior_b.resize(prob.frames.size());
  for (size_t i = 0; i < prob.frames.size(); ++i) {
    const FrameTerm& f = prob.frames[i];
    res.interior_a[i] = f.has_a ? bar.a(z, static_cast<int>(i)) : f.a_fixed;
    res.interior_b[i] = f.has_b ? bar.b(z, static_cast<int>(i)) : f.b_fixed;
    res.a[i] = f.has_a ? std::clamp(bar.a(z, static_cast<int>(i)), f.a_lo, f.a_hi) : f.a_fixed;
    res.b[i] = f.has_b ? std::clamp(bar.b(z, static_cast<int>(i)), f.b_lo, f.b_hi) : f.b_fixed;
  }
  double obj = 0.0;
  bar.value(z, t, &obj);
  res.objective = obj / scale;
  return res;
}

}  // namespace ehtx::detail
