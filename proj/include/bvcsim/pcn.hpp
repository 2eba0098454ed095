#ifndef BVCSIM_PCN_HPP
#define BVCSIM_PCN_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace bvcsim {

/// Place-cell network parameters. The membrane/learning time constants and
/// gains are free parameters of the model; the defaults here were calibrated
/// once on the desk-scale suite and then frozen.
struct PcnParams {
    double tau_p = 0.5;        // membrane time constant, s
    double gamma_pb = 6.5e-4;  // feedforward inhibition gain
    double gamma_pp = 6.0e-5;  // recurrent inhibition gain
    double psi_gain = 1200.0;  // rate gain inside tanh
    double tau_wpb = 2.0;      // learning time constant, s
    double alpha_pb = 1.0;     // Oja weight normalizer
    double dt = 0.02;          // Euler substep, s
    int substeps_per_update = 5;
    double w0 = 1.0;  // init: entries uniform on [0, w0]
    double c0 = 0.5;  // init: rows rescaled to sum alpha_pb * c0

    // Throws std::invalid_argument on non-positive values or unstable dt.
    void validate() const;
};

/// Rate network driven by BVC input: leaky membrane integration with
/// feedforward and recurrent inhibition, rectified-tanh rate readout, and
/// optional Oja plasticity on the input weights.
class PlaceCellNetwork {
public:
    PlaceCellNetwork(int n_p, int n_b, const PcnParams& params, std::uint64_t seed);

    int n_p() const { return n_p_; }
    int n_b() const { return n_b_; }
    const PcnParams& params() const { return params_; }

    const std::vector<double>& rates() const { return v_; }
    const std::vector<double>& potentials() const { return s_; }
    const std::vector<double>& weights() const { return w_; }  // row-major n_p x n_b
    double weight(int i, int j) const { return w_[static_cast<size_t>(i) * n_b_ + j]; }

    /// Advances substeps_per_update explicit-Euler substeps:
    ///   s_i += (dt/tau_p) * (-s_i + W v_b - gamma_pb * sum(v_b) - gamma_pp * sum(v_p))
    /// recomputing v_i = tanh(psi_gain * max(s_i, 0)) after each substep.
    /// With plasticity, applies one Oja update per substep using the fresh rates.
    /// Returns the rates after the last substep.
    const std::vector<double>& step(std::span<const double> v_b, bool plasticity);

    /// One Oja update with explicit rates:
    ///   W_ij += (dt/tau_wpb) * v_p_i * (v_b_j - v_p_i * W_ij / alpha_pb)
    /// clamped at 0 from below.
    void oja_update(std::span<const double> v_b, std::span<const double> v_p);

    /// Text snapshot: header with sizes and params, then potentials and
    /// row-major weights at full precision.
    void save(std::ostream& os) const;
    static PlaceCellNetwork load(std::istream& is);

private:
    PlaceCellNetwork(int n_p, int n_b, const PcnParams& params);

    int n_p_;
    int n_b_;
    PcnParams params_;
    std::vector<double> w_;
    std::vector<double> s_;
    std::vector<double> v_;
};

}  // namespace bvcsim

#endif
