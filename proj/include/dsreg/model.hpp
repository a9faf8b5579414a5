#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "dsreg/spectral.hpp"

namespace dsreg {

enum class ModelKind { dse, rds1, rds2, rds3 };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::dse: return "dse";
    case ModelKind::rds1: return "rds1";
    case ModelKind::rds2: return "rds2";
    case ModelKind::rds3: return "rds3";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "dse" || s == "DSE") return ModelKind::dse;
  if (s == "rds1" || s == "RDS1") return ModelKind::rds1;
  if (s == "rds2" || s == "RDS2") return ModelKind::rds2;
  if (s == "rds3" || s == "RDS3") return ModelKind::rds3;
  throw ParameterError("unknown model kind '" + s + "'");
}

/// Which system is evolved, and its parameters.
///
///   DSE : i v_t + Lap v + beta |v|^2 v - rho phi_x v = 0,  Lap_nu phi = (|v|^2)_x
///   RDS1: beta |v|^2 -> beta u with u = B(|v|^2)
///   RDS2: rho phi_x  -> rho Phi, Phi = B(psi_x), Lap_nu psi = u_x
///   RDS3: both
struct ModelSpec {
  ModelKind kind = ModelKind::dse;
  double beta = 1.0;
  double rho = 0.0;
  double nu = 1.0;
  double alpha = 0.0;

  bool regularized() const noexcept { return kind != ModelKind::dse; }
  /// The beta-term sees u = B(|v|^2) rather than |v|^2.
  bool smooths_local() const noexcept { return kind == ModelKind::rds1 || kind == ModelKind::rds3; }
  /// The rho-term sees B(E(B(|v|^2))) rather than E(|v|^2).
  bool smooths_nonlocal() const noexcept {
    return kind == ModelKind::rds2 || kind == ModelKind::rds3;
  }

  void validate() const {
    if (!std::isfinite(beta) || !std::isfinite(rho)) throw ParameterError("beta, rho must be finite");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("nu must be positive (elliptic-elliptic case)");
    if (regularized()) {
      if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ParameterError(std::string("alpha must be positive for ") + to_string(kind));
      }
    } else if (!(alpha >= 0.0)) {
      throw ParameterError("alpha must be nonnegative");
    }
  }

  /// Whether (beta, rho) lie in the regime the system was designed for:
  /// RDS1 rho>0, beta>0; RDS2 rho<beta<0; RDS3 rho<0, beta>0; DSE beta>min(rho,0).
  bool in_regime() const noexcept {
    switch (kind) {
      case ModelKind::dse: return beta > std::min(rho, 0.0);
      case ModelKind::rds1: return rho > 0.0 && beta > 0.0;
      case ModelKind::rds2: return rho < beta && beta < 0.0;
      case ModelKind::rds3: return rho < 0.0 && beta > 0.0;
    }
    return false;
  }

  void warn_if_out_of_regime() const {
    if (in_regime()) return;
    warn(std::string(to_string(kind)) + " run with beta=" + std::to_string(beta) +
         ", rho=" + std::to_string(rho) + " is outside its design regime");
  }
};

/// Auxiliary real fields derived from |v|^2.
struct AuxFields {
  /// Helmholtz-smoothed intensity B(|v|^2); absent for DSE.
  std::optional<RealField> u;
  /// The field multiplying -rho v: phi_x (DSE, RDS1) or Phi = B(psi_x) (RDS2, RDS3).
  RealField pot;
  /// x and y derivatives of the mean flow entering the Hamiltonian:
  /// (phi_x, phi_y) for DSE/RDS1, (psi_x, psi_y) for RDS2/RDS3.
  RealField flow_x;
  RealField flow_y;
  /// The field multiplying beta v: |v|^2 (DSE, RDS2) or u (RDS1, RDS3).
  RealField local;
};

/// Precomputed half-spectrum multipliers for one grid and model.
///
/// Intensities are built from the 2/3-dealiased field and their spectra are
/// 2/3-masked before any multiplier is applied.
class ModelOperators {
 public:
  ModelOperators(GridPtr grid, const ModelSpec& spec) : grid_(std::move(grid)), spec_(spec) {
    spec_.validate();
    const Grid2D& g = *grid_;
    const std::size_t nh = g.ny_half();
    const auto mx = dealias_axis_mask(g.nx());
    const auto my = dealias_axis_mask(g.ny());
    mask_.resize(g.half_size());
    local_.resize(g.half_size());
    pot_.resize(g.half_size());
    flow_x_.resize(g.half_size());
    flow_y_.resize(g.half_size());
    helm_.resize(g.half_size());
    for (std::size_t i = 0; i < g.nx(); ++i) {
      for (std::size_t j = 0; j < nh; ++j) {
        const std::size_t k = i * nh + j;
        const Mode m{g.kx()[i], g.ky()[j], g.nyquist_x(i) || g.nyquist_y(j)};
        const double b = spec_.regularized() ? helmholtz_symbol(m.kx, m.ky, spec_.alpha) : 1.0;
        const double exx = e_symbol(m, spec_.nu, EComponent::xx);
        const double exy = e_symbol(m, spec_.nu, EComponent::xy);
        mask_[k] = mx[i] * my[j];
        helm_[k] = b;
        local_[k] = spec_.smooths_local() ? b : 1.0;
        if (spec_.smooths_nonlocal()) {
          pot_[k] = b * exx * b;
          flow_x_[k] = exx * b;
          flow_y_[k] = exy * b;
        } else {
          pot_[k] = exx;
          flow_x_[k] = exx;
          flow_y_[k] = exy;
        }
      }
    }
    phase_.resize(g.half_size());
    for (std::size_t k = 0; k < phase_.size(); ++k) {
      phase_[k] = mask_[k] * (spec_.beta * local_[k] - spec_.rho * pot_[k]);
    }
  }

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const ModelSpec& spec() const { return spec_; }

  /// |P v|^2 where P is the 2/3 projector.
  RealField intensity(const ComplexField& v) const {
    require_space(v.space(), Space::physical, "intensity");
    require_same_grid(v.grid(), *grid_, "intensity");
    const ComplexField vd = from_spectral(dealias(to_spectral(v)));
    return abs_squared(vd);
  }

  /// theta = beta * local - rho * pot from an intensity, written into `theta`.
  /// `scratch` must hold half_size() entries.
  void phase_potential(const double* intensity, double* theta, cplx* scratch) const {
    const Fft2D& fft = fft_for(*grid_);
    fft.forward_real(intensity, scratch);
    const double scale = 1.0 / static_cast<double>(grid_->size());
    for (std::size_t k = 0; k < phase_.size(); ++k) scratch[k] *= phase_[k] * scale;
    fft.backward_real(scratch, theta);
  }

  AuxFields aux(const RealField& intensity) const {
    const Grid2D& g = *grid_;
    const Fft2D& fft = fft_for(g);
    aligned_vector<cplx> ih(g.half_size()), work(g.half_size());
    fft.forward_real(intensity.data(), ih.data());
    const double scale = 1.0 / static_cast<double>(g.size());
    auto make = [&](const aligned_vector<double>& sym) {
      for (std::size_t k = 0; k < ih.size(); ++k) work[k] = ih[k] * (mask_[k] * sym[k] * scale);
      RealField out(grid_);
      fft.backward_real(work.data(), out.data());
      return out;
    };
    AuxFields a;
    if (spec_.regularized()) a.u = make(helm_);
    a.pot = make(pot_);
    a.flow_x = make(flow_x_);
    a.flow_y = make(flow_y_);
    a.local = make(local_);
    return a;
  }

 private:
  GridPtr grid_;
  ModelSpec spec_;
  aligned_vector<double> mask_, local_, pot_, flow_x_, flow_y_, helm_, phase_;
};

inline AuxFields compute_aux(const ComplexField& v, const ModelSpec& spec) {
  ModelOperators ops(v.grid_ptr(), spec);
  return ops.aux(ops.intensity(v));
}

/// F(v) = (beta * local - rho * pot) v, the cubic part of i v_t + Lap v + F(v) = 0.
inline ComplexField nonlinearity(const ComplexField& v, const ModelSpec& spec) {
  require_space(v.space(), Space::physical, "nonlinearity");
  const AuxFields a = compute_aux(v, spec);
  ComplexField out(v.grid_ptr());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = (spec.beta * a.local[k] - spec.rho * a.pot[k]) * v[k];
  }
  return out;
}

/// N(v) = ||v||_2^2.
inline double mass(const ComplexField& v) {
  const double n = l2_norm(v);
  return n * n;
}

/// The Hamiltonian of the active system:
///   int |grad v|^2 - (beta/2) local |v|^2 + (rho/2)(flow_x^2 + nu flow_y^2).
inline double hamiltonian(const ModelOperators& ops, const ComplexField& v) {
  require_space(v.space(), Space::physical, "hamiltonian");
  const ModelSpec& spec = ops.spec();
  const RealField intensity = ops.intensity(v);
  const AuxFields a = ops.aux(intensity);
  const double kinetic = gradient_norm_squared(v);
  const double local = inner(a.local, intensity);
  const double fx = l2_norm(a.flow_x), fy = l2_norm(a.flow_y);
  return kinetic - 0.5 * spec.beta * local + 0.5 * spec.rho * (fx * fx + spec.nu * fy * fy);
}

inline double hamiltonian(const ComplexField& v, const ModelSpec& spec) {
  return hamiltonian(ModelOperators(v.grid_ptr(), spec), v);
}

}  // namespace dsreg
