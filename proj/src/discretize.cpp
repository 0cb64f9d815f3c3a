#include "convarb/treeoracle.hpp"

#include "convarb/error.hpp"
#include "convarb/models.hpp"

#include <cmath>
#include <functional>

namespace convarb {

namespace {

// healthy: no event before the next period; doomed: the event lands at the next
// period (announced one step ahead); dead: the event has happened.
enum class Status { healthy, doomed, dead };

struct State {
    Status s1 = Status::healthy;
    Status s2 = Status::healthy;
};

struct Branch {
    double prob;
    State next;
};

struct TreeSpec {
    std::function<std::vector<Branch>(const State&, int)> children;  // first entry is the continuation
    std::function<std::pair<double, double>(const State&, int)> prices;
};

bool alive(Status s) { return s != Status::dead; }

// Transitions of one announced event with hazard cdf C on the period times.
std::vector<std::pair<double, Status>> step_status(Status s, int k, int periods, const std::vector<double>& cdf) {
    if (s == Status::dead) return {};
    if (s == Status::doomed) return {{1.0, Status::dead}};
    if (k + 1 >= periods) return {{1.0, Status::healthy}};
    const double p = (cdf[k + 2] - cdf[k + 1]) / (1.0 - cdf[k + 1]);
    if (!(p > 0.0)) return {{1.0, Status::healthy}};
    return {{1.0 - p, Status::healthy}, {p, Status::doomed}};
}

// P(event after the horizon | status at period k).
double survival_given(Status s, int k, int periods, const std::vector<double>& cdf) {
    if (s != Status::healthy) return 0.0;
    if (k >= periods) return 1.0;
    return (1.0 - cdf[periods]) / (1.0 - cdf[k + 1]);
}

MarketTree build(const TreeSpec& spec, int periods, int branching) {
    std::vector<TreeNode> nodes;
    std::vector<State> states;
    std::size_t atoms = 0;
    auto add = [&](std::optional<std::int64_t> parent, int t, mpq_class prob, const State& st) {
        TreeNode n;
        n.id = static_cast<std::int64_t>(nodes.size());
        n.t = t;
        n.parent = parent;
        n.prob = prob;
        auto [x, y] = spec.prices(st, t);
        n.X = mpq_class(x);
        n.Y = mpq_class(y);
        nodes.push_back(std::move(n));
        states.push_back(st);
    };
    add(std::nullopt, 0, 1, State{});
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const int t = nodes[k].t;
        const State st = states[k];
        std::vector<Branch> kids = t < periods ? spec.children(st, t) : std::vector<Branch>{};
        if (kids.empty()) {
            if (++atoms > kMaxAtoms) throw DomainError("discretized tree exceeds " + std::to_string(kMaxAtoms) + " atoms");
            continue;
        }
        std::vector<mpq_class> probs;
        mpq_class rest = 1;
        for (std::size_t c = 0; c < kids.size(); ++c) {
            mpq_class q = c + 1 == kids.size() ? rest : mpq_class(kids[c].prob);
            rest -= q;
            probs.push_back(q);
        }
        const auto id = nodes[k].id;
        for (int b = 0; b < branching; ++b) add(id, t + 1, probs[0] / branching, kids[0].next);
        for (std::size_t c = 1; c < kids.size(); ++c) add(id, t + 1, probs[c], kids[c].next);
    }
    return MarketTree(std::move(nodes));
}

std::vector<double> period_times(double horizon, int periods) {
    std::vector<double> t(periods + 1);
    for (int k = 0; k <= periods; ++k) t[k] = horizon * k / periods;
    t[periods] = horizon;
    return t;
}

}  // namespace

MarketTree discretize_model(const std::string& model, const std::map<std::string, double>& params, int periods,
                            int branching, double horizon) {
    if (periods < 1 || periods > kMaxPeriods) throw DomainError("periods must lie in [1, " + std::to_string(kMaxPeriods) + "]");
    if (branching < 1 || branching > kMaxBranching) {
        throw DomainError("branching must lie in [1, " + std::to_string(kMaxBranching) + "]");
    }
    ModelConfig cfg;
    cfg.name = model;
    cfg.params = params;
    cfg.grid.horizon = horizon;
    const auto p = resolve_params(cfg);
    const std::vector<double> times = period_times(horizon, periods);
    TreeSpec spec;

    if (model == "survival_claim") {
        const double lx = p.at("lambda_x"), ly = p.at("lambda_y");
        const double pd = -std::expm1(-lx * horizon / periods);
        spec.children = [=](const State& s, int) -> std::vector<Branch> {
            if (!alive(s.s1)) return {};
            return {{1.0 - pd, State{Status::healthy}}, {pd, State{Status::dead}}};
        };
        spec.prices = [=](const State& s, int k) -> std::pair<double, double> {
            if (!alive(s.s1)) return {0.0, 0.0};
            const double rem = horizon - times[k];
            return {std::exp(-lx * rem), std::exp(-ly * rem)};
        };
    } else if (model == "predictable_default_variant") {
        const double ly = p.at("lambda_y"), b = p.at("barrier"), sigma = p.at("sigma");
        std::vector<double> cdf(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) cdf[k] = hitting_cdf(times[k], b, sigma);
        spec.children = [=](const State& s, int k) {
            std::vector<Branch> out;
            for (auto [q, st] : step_status(s.s1, k, periods, cdf)) out.push_back({q, State{st}});
            return out;
        };
        spec.prices = [=](const State& s, int k) -> std::pair<double, double> {
            const double y = alive(s.s1) ? std::exp(-ly * (horizon - times[k])) : 0.0;
            return {survival_given(s.s1, k, periods, cdf), y};
        };
    } else if (model == "two_defaults") {
        std::vector<double> c1(times.size()), c2(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            c1[k] = hitting_cdf(times[k], p.at("barrier1"), p.at("sigma1"));
            c2[k] = hitting_cdf(times[k], p.at("barrier2"), p.at("sigma2"));
        }
        spec.children = [=](const State& s, int k) {
            std::vector<Branch> out;
            auto a = step_status(s.s1, k, periods, c1);
            auto b = step_status(s.s2, k, periods, c2);
            if (a.empty()) a = {{1.0, Status::dead}};
            if (b.empty()) b = {{1.0, Status::dead}};
            for (auto [qa, sa] : a) {
                for (auto [qb, sb] : b) out.push_back({qa * qb, State{sa, sb}});
            }
            return out;
        };
        spec.prices = [=](const State& s, int k) -> std::pair<double, double> {
            const double r1 = (1.0 - c1[periods]) / (1.0 - c1[k]);
            const double r2 = (1.0 - c2[periods]) / (1.0 - c2[k]);
            const double x = (alive(s.s1) ? r1 : 0.0) + (1.0 - survival_given(s.s2, k, periods, c2));
            const double y = survival_given(s.s1, k, periods, c1) + 1.0 - (alive(s.s2) ? r2 : 0.0);
            return {x, y};
        };
    } else {
        throw DomainError("discretize_model supports survival_claim, predictable_default_variant and two_defaults; got '" +
                          model + "'");
    }
    return build(spec, periods, branching);
}

}  // namespace convarb
