#include "uvclt/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uvclt/errors.hpp"
#include "uvclt/report.hpp"

namespace uvclt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& message) {
    throw ConfigError("config: " + context + ": " + message);
}

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(context, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (key == k) {
                known = true;
                break;
            }
        }
        if (!known) fail(context, "unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const std::string& context, const char* key,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(context, std::string("missing required key '") + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(context, std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

std::string get_string(const json& obj, const std::string& context, const char* key,
                       std::optional<std::string> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(context, std::string("missing required key '") + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(context, std::string("key '") + key + "' must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& context, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(context, std::string("key '") + key + "' must be a boolean");
    return v.get<bool>();
}

std::vector<double> get_number_list(const json& obj, const std::string& context, const char* key) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(context, std::string("key '") + key + "' must be an array");
    for (const auto& e : v) {
        if (!e.is_number()) fail(context, std::string("key '") + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<int> get_int_list(const json& obj, const std::string& context, const char* key) {
    std::vector<int> out;
    for (double v : get_number_list(obj, context, key)) out.push_back(static_cast<int>(v));
    return out;
}

NoiseDistribution parse_noise(const json& block) {
    check_keys(block, "model.noise", {"name", "atoms", "points"});
    const std::string name = get_string(block, "model.noise", "name");
    if (name == "rademacher") return NoiseDistribution::rademacher();
    if (name == "three_point") return NoiseDistribution::three_point();
    if (name == "skewed_two_point") return NoiseDistribution::skewed_two_point();
    if (name == "discretized_gaussian") {
        return NoiseDistribution::discretized_gaussian(
            static_cast<int>(get_number(block, "model.noise", "points", 8.0)));
    }
    if (name == "custom") {
        if (!block.contains("atoms") || !block.at("atoms").is_array()) {
            fail("model.noise", "custom noise needs an 'atoms' array of [value, probability]");
        }
        std::vector<NoiseAtom> atoms;
        for (const auto& e : block.at("atoms")) {
            if (!e.is_array() || e.size() != 2) {
                fail("model.noise", "each atom must be [value, probability]");
            }
            atoms.push_back({e[0].get<double>(), e[1].get<double>()});
        }
        return NoiseDistribution::custom(std::move(atoms));
    }
    fail("model.noise", "unknown noise '" + name + "'");
}

VarianceSequence parse_variances(const json& block) {
    check_keys(block, "model.variances", {"rule", "sigma", "values", "exponent"});
    const std::string rule = get_string(block, "model.variances", "rule", "constant");
    if (rule == "constant") {
        return VarianceSequence::constant(get_number(block, "model.variances", "sigma", 1.0));
    }
    if (rule == "explicit") {
        return VarianceSequence::explicit_values(
            get_number_list(block, "model.variances", "values"));
    }
    if (rule == "power") {
        return VarianceSequence::power(get_number(block, "model.variances", "exponent"));
    }
    fail("model.variances", "unknown rule '" + rule + "'");
}

UncertaintyBand parse_band(const json& block) {
    check_keys(block, "model.band",
               {"rule", "lower", "upper", "limit_lower", "limit_upper", "c_lower", "c_upper",
                "entries"});
    const std::string rule = get_string(block, "model.band", "rule", "constant");
    if (rule == "constant") {
        return UncertaintyBand::constant(get_number(block, "model.band", "lower"),
                                         get_number(block, "model.band", "upper"));
    }
    if (rule == "explicit") {
        if (!block.contains("entries") || !block.at("entries").is_array()) {
            fail("model.band", "explicit band needs an 'entries' array of [lower, upper]");
        }
        std::vector<std::pair<double, double>> entries;
        for (const auto& e : block.at("entries")) {
            if (!e.is_array() || e.size() != 2) {
                fail("model.band", "each entry must be [lower, upper]");
            }
            entries.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        return UncertaintyBand::explicit_values(std::move(entries),
                                                get_number(block, "model.band", "limit_lower"),
                                                get_number(block, "model.band", "limit_upper"));
    }
    if (rule == "limit_plus_decay") {
        return UncertaintyBand::limit_plus_decay(
            get_number(block, "model.band", "limit_lower"),
            get_number(block, "model.band", "limit_upper"),
            get_number(block, "model.band", "c_upper", 0.0),
            get_number(block, "model.band", "c_lower", 0.0));
    }
    fail("model.band", "unknown rule '" + rule + "'");
}

TerminalFunction parse_terminal(const json& block) {
    check_keys(block, "terminal", {"name", "value"});
    const std::string name = get_string(block, "terminal", "name", "cos");
    if (name == "cos") return TerminalFunction::cosine();
    if (name == "gaussian_bump") return TerminalFunction::gaussian_bump();
    if (name == "clipped_ramp") return TerminalFunction::clipped_ramp();
    if (name == "square") return TerminalFunction::square();
    if (name == "constant") {
        return TerminalFunction::constant(get_number(block, "terminal", "value"));
    }
    fail("terminal", "unknown terminal function '" + name + "'");
}

}  // namespace

PdeGrid RunConfig::make_pde_grid(double lambda_hi) const {
    const double width = pde_half_width > 0.0 ? pde_half_width : 6.0 * lambda_hi + 2.0;
    return PdeGrid(width, pde_dx, pde_theta, pde_boundary);
}

PdeGrid RunConfig::make_dp_grid(double lambda_hi) const {
    const double width = dp_half_width > 0.0
                             ? dp_half_width
                             : (pde_half_width > 0.0 ? pde_half_width : 6.0 * lambda_hi + 2.0);
    const double dx = dp_dx > 0.0 ? dp_dx : pde_dx;
    return PdeGrid(width, dx, pde_theta, pde_boundary);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string raw = buffer.str();

    json root;
    try {
        root = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }

    check_keys(root, "top level",
               {"model", "terminal", "pde", "dp", "mc", "check", "converge", "mollify", "output"});
    if (!root.contains("model")) fail("top level", "missing required block 'model'");

    RunConfig cfg;
    cfg.config_path = path;
    cfg.config_hash = fnv1a_hex(raw);

    {
        const auto& model = root.at("model");
        check_keys(model, "model", {"noise", "variances", "band", "horizon"});
        if (!model.contains("band")) fail("model", "missing required block 'band'");
        if (!model.contains("noise")) fail("model", "missing required block 'noise'");
        try {
            cfg.model.noise = parse_noise(model.at("noise"));
            cfg.model.variances = model.contains("variances")
                                      ? parse_variances(model.at("variances"))
                                      : VarianceSequence::constant(1.0);
            cfg.model.band = parse_band(model.at("band"));
            cfg.model.horizon = static_cast<int>(get_number(model, "model", "horizon", 1.0));
            cfg.model.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: model: ") + e.what());
        }
    }

    if (root.contains("terminal")) {
        try {
            cfg.terminal = parse_terminal(root.at("terminal"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: terminal: ") + e.what());
        }
    }

    if (root.contains("pde")) {
        const auto& pde = root.at("pde");
        check_keys(pde, "pde",
                   {"half_width", "dx", "theta", "boundary", "epsilons", "dump"});
        cfg.pde_half_width = get_number(pde, "pde", "half_width", 0.0);
        cfg.pde_dx = get_number(pde, "pde", "dx", 0.01);
        cfg.pde_theta = get_number(pde, "pde", "theta", 0.5);
        const std::string boundary = get_string(pde, "pde", "boundary", "dirichlet_terminal");
        if (boundary == "dirichlet_terminal") {
            cfg.pde_boundary = BoundaryMode::dirichlet_terminal;
        } else if (boundary == "linear_extrapolation") {
            cfg.pde_boundary = BoundaryMode::linear_extrapolation;
        } else {
            fail("pde", "unknown boundary mode '" + boundary + "'");
        }
        cfg.pde_epsilons = get_number_list(pde, "pde", "epsilons");
        cfg.pde_dump = get_string(pde, "pde", "dump", "none");
        if (cfg.pde_dump != "none" && cfg.pde_dump != "slice" && cfg.pde_dump != "full") {
            fail("pde", "dump must be one of none|slice|full");
        }
    }

    if (root.contains("dp")) {
        const auto& dp = root.at("dp");
        check_keys(dp, "dp", {"rule", "candidates", "n_list", "dx", "half_width", "dump_slices"});
        const std::string rule = get_string(dp, "dp", "rule", "lambda_grid");
        if (rule == "lambda_grid") {
            cfg.dp_rule = CandidateRule::lambda_grid;
        } else if (rule == "endpoints_only") {
            cfg.dp_rule = CandidateRule::endpoints_only;
        } else {
            fail("dp", "unknown candidate rule '" + rule + "'");
        }
        cfg.dp_candidates = static_cast<int>(get_number(dp, "dp", "candidates", 21.0));
        cfg.dp_n_list = get_int_list(dp, "dp", "n_list");
        cfg.dp_dx = get_number(dp, "dp", "dx", 0.0);
        cfg.dp_half_width = get_number(dp, "dp", "half_width", 0.0);
        cfg.dp_dump_slices = get_bool(dp, "dp", "dump_slices", false);
    }
    if (cfg.dp_n_list.empty()) cfg.dp_n_list = {cfg.model.horizon};

    if (root.contains("mc")) {
        const auto& mc = root.at("mc");
        check_keys(mc, "mc", {"paths", "seed", "antithetic", "epsilon", "policy", "n"});
        cfg.mc.paths = static_cast<std::int64_t>(get_number(mc, "mc", "paths", 10000.0));
        cfg.mc.seed = static_cast<std::uint64_t>(get_number(mc, "mc", "seed", 0.0));
        cfg.mc.antithetic = get_bool(mc, "mc", "antithetic", false);
        cfg.mc.epsilon = get_number(mc, "mc", "epsilon", 0.0);
        cfg.mc_policy = get_string(mc, "mc", "policy", "constant:1.0");
        cfg.mc_horizon = static_cast<int>(get_number(mc, "mc", "n", 0.0));
        try {
            cfg.mc.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: mc: ") + e.what());
        }
    }
    if (cfg.mc_horizon <= 0) cfg.mc_horizon = cfg.model.horizon;

    if (root.contains("check")) {
        const auto& check = root.at("check");
        check_keys(check, "check",
                   {"n_list", "lindeberg_epsilons", "delta", "threshold_lindeberg",
                    "threshold_feller", "threshold_stabilization"});
        cfg.check_n_list = get_int_list(check, "check", "n_list");
        cfg.lindeberg_epsilons = get_number_list(check, "check", "lindeberg_epsilons");
        cfg.moment_delta = get_number(check, "check", "delta", 1.0);
        if (check.contains("threshold_lindeberg")) {
            cfg.check_threshold_lindeberg = get_number(check, "check", "threshold_lindeberg");
        }
        if (check.contains("threshold_feller")) {
            cfg.check_threshold_feller = get_number(check, "check", "threshold_feller");
        }
        if (check.contains("threshold_stabilization")) {
            cfg.check_threshold_stabilization =
                get_number(check, "check", "threshold_stabilization");
        }
    }
    if (cfg.check_n_list.empty()) cfg.check_n_list = {cfg.model.horizon};
    if (cfg.lindeberg_epsilons.empty()) {
        const auto def = default_lindeberg_epsilons();
        cfg.lindeberg_epsilons.assign(def.begin(), def.end());
    }

    if (root.contains("converge")) {
        const auto& conv = root.at("converge");
        check_keys(conv, "converge", {"slack"});
        cfg.converge_slack = get_number(conv, "converge", "slack", 2e-3);
    }

    if (root.contains("mollify")) {
        const auto& mol = root.at("mollify");
        check_keys(mol, "mollify",
                   {"epsilon", "window_half_width", "window_step", "quadrature_nodes",
                    "bandwidth_min", "bandwidth_max"});
        cfg.mollify.epsilon = get_number(mol, "mollify", "epsilon", 0.1);
        cfg.mollify.window_half_width = get_number(mol, "mollify", "window_half_width", 0.0);
        cfg.mollify.window_step = get_number(mol, "mollify", "window_step", 0.01);
        cfg.mollify.quadrature_nodes =
            static_cast<int>(get_number(mol, "mollify", "quadrature_nodes", 64.0));
        cfg.mollify.bandwidth_min = get_number(mol, "mollify", "bandwidth_min", 1e-4);
        cfg.mollify.bandwidth_max = get_number(mol, "mollify", "bandwidth_max", 4.0);
        try {
            cfg.mollify.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: mollify: ") + e.what());
        }
    }

    if (root.contains("output")) {
        const auto& output = root.at("output");
        check_keys(output, "output", {"dir", "format"});
        cfg.out_dir = get_string(output, "output", "dir", ".");
        const std::string format = get_string(output, "output", "format", "csv");
        if (format == "csv") {
            cfg.format = OutputFormat::csv;
        } else if (format == "json") {
            cfg.format = OutputFormat::json;
        } else {
            fail("output", "format must be csv or json");
        }
    }

    // Grid parameters must construct cleanly before any computation starts.
    try {
        cfg.make_pde_grid(std::max(cfg.model.band.uniform_bound(), 1e-6));
        cfg.make_dp_grid(std::max(cfg.model.band.uniform_bound(), 1e-6));
    } catch (const ConfigError&) {
        throw;
    }
    return cfg;
}

}  // namespace uvclt
