#include "convarb/density.hpp"

#include "convarb/error.hpp"
#include "convarb/parallel.hpp"

#include <cmath>

namespace convarb {

std::vector<double> density_factor(const MartingalePart& m, const std::vector<double>& a) {
    const std::size_t n = m.increments.size();
    JumpMarkedPath z;
    z.continuous_part.values = m.continuous_increments();
    IncrementPath qv;
    qv.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        z.continuous_part.values[i] *= -a[i];
        qv.values[i] = a[i] * a[i] * m.qv_continuous[i];
    }
    for (const Jump& j : m.jumps) z.jumps.push_back({j.step, -a[j.step] * j.size});
    return doleans_exponential(z, qv);
}

DensityPath build_density(const DecomposedPath& p, const std::vector<double>& a1_tilde, const C1C2Result& c12) {
    if (!c12.C1) throw ConstructionRefused("C1 fails");
    DensityPath d;
    d.factor1 = density_factor(p.M1, a1_tilde);
    d.factor2 = density_factor(p.M2, c12.a2_tilde);
    d.values.resize(d.factor1.size());
    for (std::size_t j = 0; j < d.values.size(); ++j) d.values[j] = d.factor1[j] * d.factor2[j];
    for (const Jump& j : p.M1.jumps) d.positive = d.positive && a1_tilde[j.step] * j.size < 1.0;
    for (const Jump& j : p.M2.jumps) d.positive = d.positive && c12.a2_tilde[j.step] * j.size < 1.0;
    return d;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

struct Moments {
    double mean = 0.0, stderr_ = 0.0;
};

Moments moments(std::span<const double> v) {
    Moments m;
    if (v.empty()) return m;
    const double n = static_cast<double>(v.size());
    m.mean = pairwise_sum(v) / n;
    if (v.size() < 2) return m;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m.mean) * (v[i] - m.mean);
    m.stderr_ = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    return m;
}

}  // namespace

MCVerdict mc_verdict(std::span<const double> samples, double target, double k_sigma, std::size_t refused) {
    MCVerdict v;
    v.samples = samples.size();
    v.refused = refused;
    if (samples.empty()) return v;
    const Moments m = moments(samples);
    v.estimate = m.mean;
    v.stderr_ = m.stderr_;
    if (v.stderr_ > 0.2 * std::abs(v.estimate)) {
        v.verdict = Verdict::inconclusive;
    } else {
        v.verdict = std::abs(v.estimate - target) <= k_sigma * v.stderr_ ? Verdict::pass : Verdict::fail;
    }
    return v;
}

std::vector<std::size_t> checkpoint_indices(const TimeGrid& grid, const std::vector<double>& times) {
    std::vector<std::size_t> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t < 0.0 || t > grid.horizon()) throw DomainError("checkpoint " + std::to_string(t) + " outside the horizon");
        out.push_back(grid.index_at_or_before(t));
    }
    return out;
}

DensitySample sample_density(const ModelConfig& cfg, std::uint64_t path_index, const std::vector<double>& checkpoints) {
    DensitySample s;
    const DecomposedPath p = simulate(cfg, path_index);
    const ASplit split = split_A(p);
    const C1C2Result c12 = check_C1_C2(p, split.A2);
    if (!c12.C1) {
        s.refused = true;
        return s;
    }
    const DensityPath d = build_density(p, split.a1_tilde, c12);
    for (std::size_t j : checkpoint_indices(p.grid, checkpoints)) {
        s.at_checkpoints.push_back(d.values[j]);
        s.X_weighted.push_back(d.values[j] * p.X[j]);
        s.Y_weighted.push_back(d.values[j] * p.Y[j]);
    }
    return s;
}

std::vector<DensitySample> sample_densities(const ModelConfig& cfg, std::size_t n_paths,
                                            const std::vector<double>& checkpoints, unsigned threads) {
    return parallel_map<DensitySample>(n_paths, threads,
                                       [&](std::size_t i) { return sample_density(cfg, i, checkpoints); });
}

MCVerdict verify_C3(const std::vector<DensitySample>& samples, double k_sigma) {
    std::vector<double> terminal;
    std::size_t refused = 0;
    for (const auto& s : samples) {
        if (s.refused) {
            ++refused;
            continue;
        }
        terminal.push_back(s.at_checkpoints.back());
    }
    return mc_verdict(terminal, 1.0, k_sigma, refused);
}

MCVerdict verify_C3(const ModelConfig& cfg, std::size_t n_paths, double k_sigma, unsigned threads) {
    return verify_C3(sample_densities(cfg, n_paths, {cfg.grid.horizon}, threads), k_sigma);
}

std::vector<double> default_checkpoints(double horizon, std::size_t count) {
    if (count < 2) throw DomainError("need at least two checkpoints");
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = horizon * static_cast<double>(k) / static_cast<double>(count - 1);
    out.back() = horizon;
    return out;
}

std::vector<SupermartingaleCheck> verify_supermartingale(const std::vector<DensitySample>& samples,
                                                         const std::vector<double>& checkpoints, double k_sigma) {
    std::vector<SupermartingaleCheck> out;
    for (const char* asset : {"X", "Y"}) {
        SupermartingaleCheck c;
        c.asset = asset;
        c.checkpoints = checkpoints;
        const bool is_x = c.asset == "X";
        std::size_t refused = 0;
        std::vector<const std::vector<double>*> rows;
        for (const auto& s : samples) {
            if (s.refused) {
                ++refused;
                continue;
            }
            rows.push_back(is_x ? &s.X_weighted : &s.Y_weighted);
        }
        std::vector<double> col(rows.size());
        for (std::size_t k = 0; k < checkpoints.size(); ++k) {
            for (std::size_t r = 0; r < rows.size(); ++r) col[r] = (*rows[r])[k];
            c.means.push_back(moments(col).mean);
        }
        for (std::size_t k = 0; k + 1 < checkpoints.size(); ++k) {
            for (std::size_t r = 0; r < rows.size(); ++r) col[r] = (*rows[r])[k + 1] - (*rows[r])[k];
            const Moments m = moments(col);
            MCVerdict v;
            v.estimate = m.mean;
            v.stderr_ = m.stderr_;
            v.samples = rows.size();
            v.refused = refused;
            if (rows.empty()) {
                v.verdict = Verdict::inconclusive;
            } else {
                v.verdict = m.mean <= k_sigma * m.stderr_ ? Verdict::pass : Verdict::fail;
            }
            c.pass = c.pass && v.verdict == Verdict::pass;
            c.increments.push_back(v);
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<SupermartingaleCheck> verify_supermartingale(const ModelConfig& cfg, std::size_t n_paths,
                                                         const std::vector<double>& checkpoints, double k_sigma,
                                                         unsigned threads) {
    return verify_supermartingale(sample_densities(cfg, n_paths, checkpoints, threads), checkpoints, k_sigma);
}

}  // namespace convarb
