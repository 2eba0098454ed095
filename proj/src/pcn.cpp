#include "bvcsim/pcn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bvcsim/rng.hpp"

namespace bvcsim {

namespace {
// Largest double below 1; rates live in the half-open interval [0, 1).
const double kMaxRate = std::nextafter(1.0, 0.0);
}  // namespace

void PcnParams::validate() const {
    const bool positive = tau_p > 0 && psi_gain > 0 && tau_wpb > 0 && alpha_pb > 0 &&
                          dt > 0 && substeps_per_update > 0 && w0 > 0 && c0 > 0;
    // Inhibition gains may be zero (disabled), e.g. for fixed-point checks.
    if (!positive || gamma_pb < 0 || gamma_pp < 0) {
        throw std::invalid_argument("PcnParams: parameters out of range");
    }
    if (!(dt < tau_p)) throw std::invalid_argument("PcnParams: dt must be < tau_p");
    if (!(dt < tau_wpb)) throw std::invalid_argument("PcnParams: dt must be < tau_wpb");
}

PlaceCellNetwork::PlaceCellNetwork(int n_p, int n_b, const PcnParams& params)
    : n_p_(n_p), n_b_(n_b), params_(params) {
    if (n_p <= 0 || n_b <= 0) {
        throw std::invalid_argument("PlaceCellNetwork: sizes must be positive");
    }
    params_.validate();
    w_.resize(static_cast<size_t>(n_p_) * n_b_, 0.0);
    s_.assign(n_p_, 0.0);
    v_.assign(n_p_, 0.0);
}

PlaceCellNetwork::PlaceCellNetwork(int n_p, int n_b, const PcnParams& params,
                                   std::uint64_t seed)
    : PlaceCellNetwork(n_p, n_b, params) {
    Rng rng(seed);
    const double target_row_sum = params_.alpha_pb * params_.c0;
    for (int i = 0; i < n_p_; ++i) {
        double* row = w_.data() + static_cast<size_t>(i) * n_b_;
        double sum = 0.0;
        for (int j = 0; j < n_b_; ++j) {
            row[j] = params_.w0 * rng.uniform();
            sum += row[j];
        }
        const double scale = target_row_sum / sum;
        for (int j = 0; j < n_b_; ++j) row[j] *= scale;
    }
}

const std::vector<double>& PlaceCellNetwork::step(std::span<const double> v_b,
                                                  bool plasticity) {
    if (static_cast<int>(v_b.size()) != n_b_) {
        throw std::invalid_argument("step: v_b size mismatch");
    }
    double sum_b = 0.0;
    for (double x : v_b) sum_b += x;

    const double k = params_.dt / params_.tau_p;
    for (int sub = 0; sub < params_.substeps_per_update; ++sub) {
        double sum_p = 0.0;
        for (double x : v_) sum_p += x;
        const double inhibition = params_.gamma_pb * sum_b + params_.gamma_pp * sum_p;
        for (int i = 0; i < n_p_; ++i) {
            const double* row = w_.data() + static_cast<size_t>(i) * n_b_;
            double drive = 0.0;
            for (int j = 0; j < n_b_; ++j) drive += row[j] * v_b[j];
            s_[i] += k * (-s_[i] + drive - inhibition);
        }
        for (int i = 0; i < n_p_; ++i) {
            // tanh rounds to 1.0 for large arguments; clamp to keep v in [0, 1).
            v_[i] = std::min(std::tanh(params_.psi_gain * std::max(s_[i], 0.0)),
                             kMaxRate);
        }
        if (plasticity) oja_update(v_b, v_);
    }
    return v_;
}

void PlaceCellNetwork::oja_update(std::span<const double> v_b,
                                  std::span<const double> v_p) {
    if (static_cast<int>(v_b.size()) != n_b_ || static_cast<int>(v_p.size()) != n_p_) {
        throw std::invalid_argument("oja_update: size mismatch");
    }
    const double lr = params_.dt / params_.tau_wpb;
    for (int i = 0; i < n_p_; ++i) {
        const double rate = v_p[i];
        if (rate == 0.0) continue;
        const double gain = lr * rate;
        const double decay = gain * rate / params_.alpha_pb;
        double* row = w_.data() + static_cast<size_t>(i) * n_b_;
        for (int j = 0; j < n_b_; ++j) {
            const double w = row[j] + gain * v_b[j] - decay * row[j];
            row[j] = w > 0.0 ? w : 0.0;
        }
    }
}

void PlaceCellNetwork::save(std::ostream& os) const {
    char buf[320];
    os << "# pcn v1\n";
    os << n_p_ << ' ' << n_b_ << '\n';
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %d %.17g %.17g\n",
                  params_.tau_p, params_.gamma_pb, params_.gamma_pp, params_.psi_gain,
                  params_.tau_wpb, params_.alpha_pb, params_.dt,
                  params_.substeps_per_update, params_.w0, params_.c0);
    os << buf;
    for (int i = 0; i < n_p_; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", s_[i]);
        os << buf;
    }
    for (size_t idx = 0; idx < w_.size(); ++idx) {
        std::snprintf(buf, sizeof buf, "%.17g", w_[idx]);
        os << buf << (((idx + 1) % n_b_ == 0) ? '\n' : ' ');
    }
}

PlaceCellNetwork PlaceCellNetwork::load(std::istream& is) {
    std::string header;
    std::getline(is, header);
    if (header != "# pcn v1") throw std::runtime_error("pcn snapshot: bad header");
    int n_p = 0, n_b = 0;
    is >> n_p >> n_b;
    PcnParams p;
    is >> p.tau_p >> p.gamma_pb >> p.gamma_pp >> p.psi_gain >> p.tau_wpb >>
        p.alpha_pb >> p.dt >> p.substeps_per_update >> p.w0 >> p.c0;
    if (!is) throw std::runtime_error("pcn snapshot: bad params");
    PlaceCellNetwork net(n_p, n_b, p);
    for (int i = 0; i < n_p; ++i) is >> net.s_[i];
    for (double& w : net.w_) is >> w;
    if (!is) throw std::runtime_error("pcn snapshot: truncated");
    for (int i = 0; i < n_p; ++i) {
        net.v_[i] = std::min(std::tanh(p.psi_gain * std::max(net.s_[i], 0.0)), kMaxRate);
    }
    return net;
}

}  // namespace bvcsim
