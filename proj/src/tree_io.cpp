#include "convarb/treeoracle.hpp"

#include "convarb/error.hpp"

#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace convarb {

using detail::ojson;

mpq_class parse_rational(const std::string& raw) {
    std::string s = raw;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    if (s.empty()) throw DomainError("empty rational");
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const std::size_t frac = s.size() - dot - 1;
        if (frac == 0 || digits.empty() || digits == "-" || digits.find_first_not_of("-0123456789") != std::string::npos ||
            digits.find('-', 1) != std::string::npos) {
            throw DomainError("invalid decimal '" + raw + "'");
        }
        mpz_class num(digits, 10), den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }
    if (s.find_first_not_of("-0123456789/") != std::string::npos) throw DomainError("invalid rational '" + raw + "'");
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw DomainError("invalid rational '" + raw + "'");
    if (sgn(q.get_den()) == 0) throw DomainError("zero denominator in '" + raw + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const mpq_class& q) { return q.get_str(); }

namespace {

mpq_class rational_field(const ojson& node, const char* key) {
    if (!node.contains(key)) throw DomainError(std::string("node lacks field '") + key + "'");
    const ojson& v = node.at(key);
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return mpq_class(v.get<long>());
    if (v.is_number_float()) return mpq_class(v.get<double>());
    throw DomainError(std::string("field '") + key + "' must be a rational string or a number");
}

}  // namespace

MarketTree parse_tree(const std::string& text) {
    const ojson doc = detail::parse_json(text, "tree");
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw DomainError("tree file must be an object with a 'nodes' array");
    }
    std::vector<TreeNode> nodes;
    for (const auto& j : doc["nodes"]) {
        TreeNode n;
        try {
            n.id = j.at("id").get<std::int64_t>();
            n.t = j.at("t").get<int>();
            if (j.contains("parent") && !j["parent"].is_null()) n.parent = j["parent"].get<std::int64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw DomainError(std::string("malformed node: ") + e.what());
        }
        n.prob = n.parent ? rational_field(j, "prob") : mpq_class(1);
        n.X = rational_field(j, "X");
        n.Y = rational_field(j, "Y");
        nodes.push_back(std::move(n));
    }
    return MarketTree(std::move(nodes));
}

MarketTree load_tree(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tree file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tree(ss.str());
}

std::string tree_to_json(const MarketTree& tree) {
    ojson nodes = ojson::array();
    for (const auto& n : tree.nodes()) {
        ojson j;
        j["id"] = n.id;
        j["t"] = n.t;
        j["parent"] = n.parent ? ojson(*n.parent) : ojson(nullptr);
        j["prob"] = to_string(n.prob);
        j["X"] = to_string(n.X);
        j["Y"] = to_string(n.Y);
        nodes.push_back(std::move(j));
    }
    ojson doc;
    doc["nodes"] = std::move(nodes);
    return doc.dump(2) + "\n";
}

std::string result_to_json(const MarketTree& tree, const OracleResult& r, bool verified) {
    ojson doc;
    doc["feasible"] = r.feasible;
    doc["optimum"] = to_string(r.optimum);
    doc["verified"] = verified;
    doc["atoms"] = tree.atoms().size();
    if (r.measure) {
        ojson m = ojson::array();
        for (std::size_t w = 0; w < tree.atoms().size(); ++w) {
            m.push_back({{"atom", tree.node(tree.atoms()[w]).id}, {"q", to_string((*r.measure)[w])}});
        }
        doc["measure"] = std::move(m);
    } else {
        doc["measure"] = nullptr;
    }
    if (r.certificate) {
        const Certificate& c = *r.certificate;
        ojson holdings = ojson::array();
        for (const auto& [k, px] : c.piX) {
            holdings.push_back({{"node", tree.node(k).id},
                                {"piX", to_string(px)},
                                {"piY", to_string(c.piY.at(k))},
                                {"cash", to_string(c.cash.at(k))},
                                {"value", to_string(c.value[k])}});
        }
        ojson terminal = ojson::array();
        for (std::size_t w : tree.atoms()) {
            terminal.push_back({{"atom", tree.node(w).id}, {"value", to_string(c.value[w])}});
        }
        doc["certificate"] = {{"holdings", std::move(holdings)}, {"terminal_values", std::move(terminal)}};
    } else {
        doc["certificate"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

}  // namespace convarb
