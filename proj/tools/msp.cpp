// msp: command-line front end. Reads an optional JSON config, applies flag
// overrides, validates everything, computes, and only then writes files.
// Exit status: 0 ok, 2 config/usage error (nothing written), 3 physics error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msp/eigenstates.hpp"
#include "msp/io.hpp"
#include "msp/msp.hpp"
#include "msp/svg.hpp"

using json = nlohmann::ordered_json;

namespace {

/// Bad config or flags: exit 2.
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Schema

enum class Kind { Number, Integer, Fraction, String, Bool, NumberList };

struct Field
{
    const char* key;
    Kind kind;
    double lo = -HUGE_VAL;
    bool lo_open = false;
    double hi = HUGE_VAL;
    bool hi_open = false;
    std::vector<std::string> choices = {};
};

constexpr double inf = HUGE_VAL;

const std::vector<std::pair<std::string, std::vector<Field>>>& schema()
{
    static const std::vector<std::pair<std::string, std::vector<Field>>> s = {
        {"well",
         {{"well_nm", Kind::Number, 0.0, true},
          {"barrier_meV", Kind::Number, 0.0, true},
          {"eff_mass", Kind::Number, 0.0, true},
          {"eps_s", Kind::Number, 1.0},
          {"Ns_cm2", Kind::Number, 0.0},
          {"grid_points", Kind::Integer, 16.0, false, 200000.0},
          {"barrier_pad_nm", Kind::Number, 0.0, true},
          {"temperature_K", Kind::Number, 0.0},
          {"n_states", Kind::Integer, 2.0, false, 400.0}}},
        {"plasmons",
         {{"gamma_meV", Kind::Number, 0.0, true},
          {"omega_min_meV", Kind::Number, 0.0, true},
          {"omega_max_meV", Kind::Number, 0.0, true},
          {"points", Kind::Integer, 2.0, false, 1e6}}},
        {"coupling",
         {{"omega0_meV", Kind::Number, 0.0, true},
          {"theta_deg", Kind::Number, 0.0, false, 90.0, true},
          {"eps_s", Kind::Number, 1.0},
          {"g", Kind::Number, 0.0, true},
          {"Q", Kind::Number, 0.0, true},
          {"gamma0", Kind::Fraction, 0.0},
          {"gamma", Kind::Fraction, 0.0, true}}},
        {"spectrum",
         {{"variant", Kind::String, -inf, false, inf, false, {"full", "rwa", "markov", "markov-rwa", "mirror"}},
          {"points", Kind::Integer, 3.0, false, 1e6},
          {"span", Kind::Number, 1.0, true}}},
        {"peaks",
         {{"variant", Kind::String, -inf, false, inf, false, {"full", "rwa", "markov", "markov-rwa", "mirror"}},
          {"g_min", Kind::Number, 0.0, true},
          {"g_max", Kind::Number, 0.0, true},
          {"points", Kind::Integer, 2.0, false, 1e5}}},
        {"halfmax",
         {{"variant", Kind::String, -inf, false, inf, false, {"full", "rwa", "markov", "markov-rwa", "mirror"}},
          {"quantity", Kind::String, -inf, false, inf, false, {"alpha", "r"}},
          {"ratios", Kind::NumberList, 0.0, true}}},
        {"thermal",
         {{"T_el", Kind::Number, 0.0},
          {"T_ph", Kind::Number, 0.0},
          {"mirror", Kind::Bool},
          {"points", Kind::Integer, 3.0, false, 1e6},
          {"span", Kind::Number, 1.0, true}}},
        {"dispersion",
         {{"n_k", Kind::Integer, 2.0, false, 4096.0},
          {"n_omega", Kind::Integer, 2.0, false, 4096.0},
          {"k_max", Kind::Number, 0.0, true},
          {"omega_max", Kind::Number, 0.0, true}}},
        {"gamma",
         {{"theta_min_deg", Kind::Number, 0.0, false, 90.0, true},
          {"theta_max_deg", Kind::Number, 0.0, false, 90.0, true},
          {"points", Kind::Integer, 2.0, false, 1e5}}},
        {"critical_angle",
         {{"gamma_meV", Kind::Number, 0.0, true},
          {"densities_cm2", Kind::NumberList, 0.0, true}}},
    };
    return s;
}

json defaults()
{
    return json::parse(R"({
      "well": {"well_nm": 15, "barrier_meV": 520, "eff_mass": 0.043, "eps_s": 12.9, "Ns_cm2": 1.5e13,
               "grid_points": 1024, "barrier_pad_nm": 20, "temperature_K": 0, "n_states": 40},
      "plasmons": {"gamma_meV": 5, "omega_min_meV": 1, "omega_max_meV": 400, "points": 2001},
      "coupling": {"omega0_meV": 100, "theta_deg": 45, "eps_s": 12.9},
      "spectrum": {"variant": "full", "points": 4001, "span": 50},
      "peaks": {"variant": "full", "g_min": 0.001, "g_max": 1000, "points": 61},
      "halfmax": {"variant": "full", "quantity": "alpha", "ratios": [0.05, 0.1, 0.2, 0.3, 0.35, 0.5, 1, 2]},
      "thermal": {"T_el": 300, "T_ph": 0, "mirror": false, "points": 4001, "span": 50},
      "dispersion": {"n_k": 512, "n_omega": 512, "k_max": 2, "omega_max": 2},
      "gamma": {"theta_min_deg": 0, "theta_max_deg": 85, "points": 86},
      "critical_angle": {"gamma_meV": 10, "densities_cm2": [1e12, 2e12, 5e12, 1e13, 2e13, 5e13, 1e14]}
    })");
}

/// "0.25", "1/30" or "2/15" -> value.
double parse_fraction(const std::string& text, const std::string& where)
{
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used != text.size())
                throw std::invalid_argument(text);
            return v;
        }
        const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
        const double num = std::stod(a, &used);
        if (used != a.size())
            throw std::invalid_argument(text);
        const double den = std::stod(b, &used);
        if (used != b.size() || den == 0.0)
            throw std::invalid_argument(text);
        return num / den;
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + text + "' is not a number or fraction a/b");
    }
}

std::string describe_range(const Field& f)
{
    std::ostringstream os;
    if (f.lo > -inf)
        os << (f.lo_open ? " > " : " >= ") << f.lo;
    if (f.hi < inf)
        os << (f.lo > -inf ? " and" : "") << (f.hi_open ? " < " : " <= ") << f.hi;
    return os.str();
}

void check_range(const Field& f, double v, const std::string& where)
{
    const bool ok_lo = f.lo_open ? v > f.lo : v >= f.lo;
    const bool ok_hi = f.hi_open ? v < f.hi : v <= f.hi;
    if (!std::isfinite(v) || !ok_lo || !ok_hi)
        throw ConfigError(where + ": must be" + describe_range(f));
}

/// Checks one value against its field and returns it in canonical form.
json check_field(const Field& f, const json& v, const std::string& where)
{
    switch (f.kind) {
    case Kind::Number:
        if (!v.is_number())
            throw ConfigError(where + ": expected a number");
        check_range(f, v.get<double>(), where);
        return v.get<double>();
    case Kind::Integer:
        if (!v.is_number_integer())
            throw ConfigError(where + ": expected an integer");
        check_range(f, v.get<double>(), where);
        return v.get<long long>();
    case Kind::Fraction: {
        double x;
        if (v.is_number())
            x = v.get<double>();
        else if (v.is_string())
            x = parse_fraction(v.get<std::string>(), where);
        else
            throw ConfigError(where + ": expected a number or a fraction string like \"1/30\"");
        check_range(f, x, where);
        return x;
    }
    case Kind::String:
        if (!v.is_string())
            throw ConfigError(where + ": expected a string");
        if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
            std::string opts;
            for (const auto& c : f.choices)
                opts += (opts.empty() ? "" : "|") + c;
            throw ConfigError(where + ": '" + v.get<std::string>() + "' is not one of " + opts);
        }
        return v;
    case Kind::Bool:
        if (!v.is_boolean())
            throw ConfigError(where + ": expected true or false");
        return v;
    case Kind::NumberList: {
        if (!v.is_array() || v.empty())
            throw ConfigError(where + ": expected a non-empty array of numbers");
        json out = json::array();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string w = where + "[" + std::to_string(i) + "]";
            if (!v[i].is_number())
                throw ConfigError(w + ": expected a number");
            check_range(f, v[i].get<double>(), w);
            out.push_back(v[i].get<double>());
        }
        return out;
    }
    }
    return v;
}

/// Merges a user document into the defaults, rejecting unknown keys.
void merge_config(json& resolved, const json& user, const std::string& file)
{
    if (!user.is_object())
        throw ConfigError(file + ": top level must be an object");
    for (const auto& [section, body] : user.items()) {
        const auto it = std::find_if(schema().begin(), schema().end(), [&](const auto& s) { return s.first == section; });
        if (it == schema().end())
            throw ConfigError(file + ": unknown section '" + section + "'");
        if (!body.is_object())
            throw ConfigError(file + ": section '" + section + "' must be an object");
        for (const auto& [key, value] : body.items()) {
            const auto f = std::find_if(it->second.begin(), it->second.end(), [&](const Field& x) { return key == x.key; });
            if (f == it->second.end())
                throw ConfigError(file + ": unknown field '" + section + "." + key + "'");
            resolved[section][key] = check_field(*f, value, file + ": field '" + section + "." + key + "'");
        }
    }
}

json read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        // message carries the line and column
        throw ConfigError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Resolved inputs

struct Flags
{
    std::string command;
    std::string config;
    std::string out = ".";
    std::string format = "csv";
    bool svg = false;
    std::optional<double> g, Q, theta;
    std::optional<std::string> variant, gamma0, gamma;
    std::optional<double> Tel, Tph;
    bool mirror = false;
};

/// Coupling parameters from either (g, Q) or (gamma0, gamma) in units of
/// omega0. The resolved section records both forms.
msp::CouplingParams resolve_coupling(json& c)
{
    const bool rates = c.contains("gamma0") || c.contains("gamma");
    const bool gq = c.contains("g") || c.contains("Q");
    if (rates && gq)
        throw ConfigError("coupling: give either (g, Q) or (gamma0, gamma), not both");
    const double w0 = c["omega0_meV"].get<double>();
    const double theta = c["theta_deg"].get<double>();
    msp::CouplingParams p;
    p.omega0 = w0;
    p.eps_s = c["eps_s"].get<double>();
    if (rates) {
        if (!c.contains("gamma0") || !c.contains("gamma"))
            throw ConfigError("coupling: gamma0 and gamma must be given together");
        p.gamma0 = c["gamma0"].get<double>() * w0;
        p.gamma_nr = c["gamma"].get<double>() * w0;
    } else {
        const double g = c.value("g", 1.0), Q = c.value("Q", 15.0);
        if (!(theta > 0.0))
            throw ConfigError("coupling: g and Q need theta_deg > 0");
        p = msp::CouplingParams::from_gq(g, Q, theta, w0, p.eps_s);
    }
    try {
        p.validate();
    } catch (const msp::Error& e) {
        throw ConfigError(std::string("coupling: ") + e.what());
    }
    // fixed key order whichever form was given
    json out;
    out["omega0_meV"] = w0;
    out["theta_deg"] = theta;
    out["eps_s"] = p.eps_s;
    out["g"] = theta > 0.0 ? p.g(theta) : 0.0;
    out["Q"] = p.Q();
    out["gamma0"] = p.gamma0 / w0;
    out["gamma"] = p.gamma_nr / w0;
    c = out;
    return p;
}

struct Resolved
{
    json params;
    msp::CouplingParams coupling;
};

Resolved resolve(const Flags& fl)
{
    static const std::vector<std::string> commands = {"subbands", "plasmons", "gamma", "spectrum", "peaks",
                                                      "halfmax", "thermal", "dispersion", "critical-angle"};
    if (std::find(commands.begin(), commands.end(), fl.command) == commands.end())
        throw ConfigError("unknown command '" + fl.command + "'");
    if (fl.format != "csv" && fl.format != "json")
        throw ConfigError("--format must be csv or json");
    if (std::filesystem::exists(fl.out) && !std::filesystem::is_directory(fl.out))
        throw ConfigError("--out '" + fl.out + "' exists and is not a directory");

    json r = json::object();
    merge_config(r, defaults(), "defaults");
    if (!fl.config.empty())
        merge_config(r, read_config(fl.config), fl.config);

    json overrides = json::object();
    auto set = [&](const char* section, const char* key, json v) { overrides[section][key] = std::move(v); };
    if (fl.g)
        set("coupling", "g", *fl.g);
    if (fl.Q)
        set("coupling", "Q", *fl.Q);
    if (fl.theta)
        set("coupling", "theta_deg", *fl.theta);
    if (fl.gamma0)
        set("coupling", "gamma0", *fl.gamma0);
    if (fl.gamma)
        set("coupling", "gamma", *fl.gamma);
    if (fl.variant) {
        set("spectrum", "variant", *fl.variant);
        set("peaks", "variant", *fl.variant);
        set("halfmax", "variant", *fl.variant);
    }
    if (fl.Tel)
        set("thermal", "T_el", *fl.Tel);
    if (fl.Tph)
        set("thermal", "T_ph", *fl.Tph);
    if (fl.mirror)
        set("thermal", "mirror", true);
    // a flag in one coupling form replaces the config's other form
    if (overrides.contains("coupling")) {
        const auto& oc = overrides["coupling"];
        if (oc.contains("g") || oc.contains("Q")) {
            r["coupling"].erase("gamma0");
            r["coupling"].erase("gamma");
        }
        if (oc.contains("gamma0") || oc.contains("gamma")) {
            r["coupling"].erase("g");
            r["coupling"].erase("Q");
        }
    }
    merge_config(r, overrides, "command line");
    const auto p = resolve_coupling(r["coupling"]);

    if (!(r["plasmons"]["omega_max_meV"].get<double>() > r["plasmons"]["omega_min_meV"].get<double>()))
        throw ConfigError("plasmons: omega_max_meV must exceed omega_min_meV");
    if (!(r["peaks"]["g_max"].get<double>() > r["peaks"]["g_min"].get<double>()))
        throw ConfigError("peaks: g_max must exceed g_min");
    if (!(r["gamma"]["theta_max_deg"].get<double>() > r["gamma"]["theta_min_deg"].get<double>()))
        throw ConfigError("gamma: theta_max_deg must exceed theta_min_deg");
    const double theta = r["coupling"]["theta_deg"].get<double>();
    if ((fl.command == "spectrum" || fl.command == "peaks" || fl.command == "halfmax") && !(theta > 0.0))
        throw ConfigError("coupling.theta_deg must be > 0 for " + fl.command);
    return {r, p};
}

// ---------------------------------------------------------------------------
// Commands

struct Output
{
    msp::io::Table table;
    std::optional<std::string> svg;
};

msp::SubbandSet filled_subbands(const json& w, double Ns_cm2)
{
    msp::SquareWellSpec spec;
    spec.well_nm = w["well_nm"].get<double>();
    spec.barrier_meV = w["barrier_meV"].get<double>();
    spec.eff_mass = w["eff_mass"].get<double>();
    spec.eps_s = w["eps_s"].get<double>();
    spec.Ns_cm2 = Ns_cm2;
    spec.grid_points = w["grid_points"].get<int>();
    spec.barrier_pad_nm = w["barrier_pad_nm"].get<double>();
    spec.temperature_K = w["temperature_K"].get<double>();
    const auto s = msp::solve_subbands(msp::square_well(spec), w["n_states"].get<std::size_t>());
    return msp::fill_subbands(s, Ns_cm2, spec.eff_mass, spec.temperature_K);
}

msp::PlasmonModeSet well_modes(const json& w, double Ns_cm2)
{
    const double m = w["eff_mass"].get<double>();
    return msp::plasmon_modes(msp::build_transitions(filled_subbands(w, Ns_cm2), m), w["eps_s"].get<double>());
}

std::vector<Output> run_subbands(const json& r)
{
    const auto& w = r["well"];
    const auto s = filled_subbands(w, w["Ns_cm2"].get<double>());
    const auto t = msp::build_transitions(s, w["eff_mass"].get<double>());

    Output psi{{"wavefunctions", {"z_nm"}, {}, {}}, {}};
    for (std::size_t i = 0; i < s.size(); ++i)
        psi.table.columns.push_back("psi_" + std::to_string(i + 1));
    for (Eigen::Index j = 0; j < s.z_nm.size(); ++j) {
        std::vector<double> row{s.z_nm[j]};
        for (Eigen::Index i = 0; i < s.wavefunctions.cols(); ++i)
            row.push_back(s.wavefunctions(j, i));
        psi.table.add_row(row);
    }
    std::vector<msp::svg::Series> series;
    for (Eigen::Index i = 0; i < s.wavefunctions.cols(); ++i) {
        msp::svg::Series ser{"psi_" + std::to_string(i + 1), {}, {}};
        for (Eigen::Index j = 0; j < s.z_nm.size(); ++j) {
            ser.x.push_back(s.z_nm[j]);
            ser.y.push_back(s.wavefunctions(j, i));
        }
        series.push_back(std::move(ser));
    }
    psi.svg = msp::svg::line_plot({"Subband envelopes", "z (nm)", "psi (nm^-1/2)"}, series);

    Output tr{{"transitions", {"i", "f", "w_meV", "dN_cm2", "intJ"}, {true, true, false, false, false}, {}}, {}};
    for (std::size_t a = 0; a < t.size(); ++a) {
        const auto& it = t.items[a];
        tr.table.add_row({static_cast<double>(it.initial + 1), static_cast<double>(it.final + 1), it.w_meV,
                          it.delta_pop_cm2, t.integrated_current(a)});
    }
    return {psi, tr};
}

std::vector<Output> run_plasmons(const json& r)
{
    const auto& w = r["well"];
    const double eps = w["eps_s"].get<double>();
    const auto t = msp::build_transitions(filled_subbands(w, w["Ns_cm2"].get<double>()), w["eff_mass"].get<double>());
    const auto modes = msp::plasmon_modes(t, eps);

    Output m{{"modes", {"n", "omega_meV", "weight", "gamma0_meV"}, {true, false, false, false}, {}}, {}};
    for (std::size_t n = 0; n < modes.size(); ++n)
        m.table.add_row({static_cast<double>(n + 1), modes.frequencies_meV[static_cast<Eigen::Index>(n)],
                         modes.weights[static_cast<Eigen::Index>(n)], msp::mode_gamma0(modes, n, eps)});

    const auto& pc = r["plasmons"];
    const auto grid = msp::numeric::linspace(pc["omega_min_meV"].get<double>(), pc["omega_max_meV"].get<double>(),
                                             pc["points"].get<std::size_t>());
    const Eigen::VectorXd om = Eigen::Map<const Eigen::VectorXd>(grid.data(), static_cast<Eigen::Index>(grid.size()));
    const auto spec = msp::absorption_spectrum(t, modes, pc["gamma_meV"].get<double>(), om);
    Output a{{"absorption", {"omega_meV", "A_sp", "A_msp"}, {}, {}}, {}};
    msp::svg::Series sp{"single particle", {}, {}}, mp{"MSP", {}, {}};
    for (Eigen::Index i = 0; i < om.size(); ++i) {
        a.table.add_row({om[i], spec.single_particle[i], spec.msp[i]});
        sp.x.push_back(om[i]);
        sp.y.push_back(spec.single_particle[i]);
        mp.x.push_back(om[i]);
        mp.y.push_back(spec.msp[i]);
    }
    a.svg = msp::svg::line_plot({"Absorption", "hbar omega (meV)", "A (1/meV)"}, {sp, mp});
    return {m, a};
}

std::vector<Output> run_gamma(const json& r)
{
    const auto& w = r["well"];
    const auto modes = well_modes(w, w["Ns_cm2"].get<double>());
    msp::CouplingParams p;
    p.omega0 = modes.omega0_meV;
    p.gamma0 = msp::bright_gamma0(modes, w["eps_s"].get<double>());
    const auto& gc = r["gamma"];
    Output o{{"gamma", {"theta_deg", "gamma_meV"}, {}, {}}, {}};
    msp::svg::Series s{"Gamma(theta, omega0)", {}, {}};
    for (double th : msp::numeric::linspace(gc["theta_min_deg"].get<double>(), gc["theta_max_deg"].get<double>(),
                                            gc["points"].get<std::size_t>())) {
        const double v = msp::gamma_theta(p, th, p.omega0);
        o.table.add_row({th, v});
        s.x.push_back(th);
        s.y.push_back(v);
    }
    o.svg = msp::svg::line_plot({"Radiative rate", "theta (deg)", "hbar Gamma (meV)"}, {s});
    return {o};
}

std::vector<Output> run_critical_angle(const json& r)
{
    const auto& w = r["well"];
    const auto& cc = r["critical_angle"];
    Output o{{"critical_angle", {"Ns_cm2", "theta_c_deg"}, {}, {}}, {}};
    msp::svg::Series s{"theta_c", {}, {}};
    for (const auto& ns : cc["densities_cm2"]) {
        const auto modes = well_modes(w, ns.get<double>());
        msp::CouplingParams p;
        p.omega0 = modes.omega0_meV;
        p.gamma0 = msp::bright_gamma0(modes, w["eps_s"].get<double>());
        p.gamma_nr = cc["gamma_meV"].get<double>();
        const double th = msp::critical_angle(p);
        o.table.add_row({ns.get<double>(), th});
        s.x.push_back(ns.get<double>());
        s.y.push_back(th);
    }
    o.svg = msp::svg::line_plot({"Critical angle", "N_s (cm^-2)", "theta_c (deg)", true}, {s});
    return {o};
}

std::vector<Output> run_spectrum(const json& r, const msp::CouplingParams& p)
{
    const auto& sc = r["spectrum"];
    const auto v = msp::parse_variant(sc["variant"].get<std::string>());
    const double theta = r["coupling"]["theta_deg"].get<double>();
    const auto tab = msp::optical_coefficients(
        p, theta, msp::default_grid(sc["points"].get<std::size_t>(), sc["span"].get<double>()), v);
    Output o{{"spectrum", {"omega_norm", "re_t", "im_t", "re_r", "im_r", "alpha"}, {}, {}}, {}};
    msp::svg::Series st{"|t|^2", {}, {}}, sr{"|r|^2", {}, {}}, sa{"alpha", {}, {}};
    for (std::size_t i = 0; i < tab.omega_norm.size(); ++i) {
        o.table.add_row({tab.omega_norm[i], tab.t[i].real(), tab.t[i].imag(), tab.r[i].real(), tab.r[i].imag(),
                         tab.alpha[i]});
        for (auto* s : {&st, &sr, &sa})
            s->x.push_back(tab.omega_norm[i]);
        st.y.push_back(std::norm(tab.t[i]));
        sr.y.push_back(std::norm(tab.r[i]));
        sa.y.push_back(tab.alpha[i]);
    }
    o.svg = msp::svg::line_plot({"Optical coefficients", "omega / omega0", "", true}, {st, sr, sa});
    return {o};
}

std::vector<Output> run_peaks(const json& r, const msp::CouplingParams& p)
{
    const auto& pc = r["peaks"];
    const auto v = msp::parse_variant(pc["variant"].get<std::string>());
    const auto g = msp::numeric::logspace(pc["g_min"].get<double>(), pc["g_max"].get<double>(),
                                          pc["points"].get<std::size_t>());
    const auto rows = msp::peak_curves(p.Q(), r["coupling"]["theta_deg"].get<double>(), g, v);
    Output o{{"peaks", {"g", "peak_alpha", "peak_r2", "perturbative_alpha", "perturbative_r2"}, {}, {}}, {}};
    msp::svg::Series sa{"max alpha", {}, {}}, sr{"max |r|^2", {}, {}};
    for (const auto& row : rows) {
        o.table.add_row({row.g, row.peak_alpha, row.peak_r2, row.perturbative_alpha, row.perturbative_r2});
        sa.x.push_back(row.g);
        sa.y.push_back(row.peak_alpha);
        sr.x.push_back(row.g);
        sr.y.push_back(row.peak_r2);
    }
    o.svg = msp::svg::line_plot({"Peak values", "g", "", true}, {sa, sr});
    return {o};
}

std::vector<Output> run_halfmax(const json& r, const msp::CouplingParams& p)
{
    const auto& hc = r["halfmax"];
    const auto v = msp::parse_variant(hc["variant"].get<std::string>());
    const auto which = msp::parse_half_max_quantity(hc["quantity"].get<std::string>());
    const auto ratios = hc["ratios"].get<std::vector<double>>();
    const auto rows = msp::half_max_frequencies(p, r["coupling"]["theta_deg"].get<double>(), v, ratios, which);
    Output o{{"halfmax", {"ratio", "omega_minus", "omega_plus", "markov_minus", "markov_plus"}, {}, {}}, {}};
    msp::svg::Series lo{"omega-", {}, {}}, hi{"omega+", {}, {}}, ml{"Markov -", {}, {}}, mh{"Markov +", {}, {}};
    for (const auto& row : rows) {
        o.table.add_row({row.ratio, row.omega_minus, row.omega_plus, row.markov_minus, row.markov_plus});
        for (auto* s : {&lo, &hi, &ml, &mh})
            s->x.push_back(row.ratio);
        lo.y.push_back(row.omega_minus);
        hi.y.push_back(row.omega_plus);
        ml.y.push_back(row.markov_minus);
        mh.y.push_back(row.markov_plus);
    }
    o.svg = msp::svg::line_plot({"Half-maximum frequencies", "Gamma / omega0", "omega / omega0", true},
                                {lo, hi, ml, mh});
    return {o};
}

std::vector<Output> run_thermal(const json& r, const msp::CouplingParams& p)
{
    const auto& tc = r["thermal"];
    msp::ThermalScenario s;
    s.T_el = tc["T_el"].get<double>();
    s.T_ph = tc["T_ph"].get<double>();
    s.theta_deg = r["coupling"]["theta_deg"].get<double>();
    s.params = p;
    s.variant = tc["mirror"].get<bool>() ? msp::ModelVariant::Mirror : msp::ModelVariant::Full;
    for (double x : msp::default_grid(tc["points"].get<std::size_t>(), tc["span"].get<double>()))
        s.omega_meV.push_back(x * p.omega0);
    const auto e = msp::emitted_spectrum(s);
    Output o{{"thermal", {"omega_meV", "n_out", "planck_Tel", "planck_Tph", "alpha"}, {}, {}}, {}};
    msp::svg::Series so{"n_out", {}, {}}, se{"n_B(T_el)", {}, {}}, sp{"n_B(T_ph)", {}, {}};
    for (std::size_t i = 0; i < e.omega_meV.size(); ++i) {
        o.table.add_row({e.omega_meV[i], e.photons_out[i], e.planck_Tel[i], e.planck_Tph[i], e.alpha_used[i]});
        for (auto* q : {&so, &se, &sp})
            q->x.push_back(e.omega_meV[i]);
        so.y.push_back(e.photons_out[i]);
        se.y.push_back(e.planck_Tel[i]);
        sp.y.push_back(e.planck_Tph[i]);
    }
    o.svg = msp::svg::line_plot({"Emitted photon occupancy", "hbar omega (meV)", "n", true}, {so, se, sp});
    return {o};
}

std::vector<Output> run_dispersion(const json& r, const msp::CouplingParams& p)
{
    const auto& dc = r["dispersion"];
    const auto m = msp::dispersion_map(p, dc["n_k"].get<std::size_t>(), dc["n_omega"].get<std::size_t>(),
                                       dc["k_max"].get<double>(), dc["omega_max"].get<double>());
    const Eigen::MatrixXd w = msp::max_normalized(m);
    Output o{{"dispersion", {"k_norm", "omega_norm", "weight"}, {}, {}}, {}};
    for (std::size_t i = 0; i < m.k.size(); ++i)
        for (std::size_t j = 0; j < m.omega.size(); ++j)
            o.table.add_row({m.k[i], m.omega[j], w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))});
    o.svg = msp::svg::heatmap({"Plasmon weight", "c k / sqrt(eps_s) omega0", "Omega / omega0"}, m.k, m.omega, w, 1.0);
    return {o};
}

// ---------------------------------------------------------------------------
// Output

std::vector<std::string> header(const std::string& command, const json& resolved)
{
    return {std::string("msp ") + msp::version, "command: " + command, "params: " + resolved.dump()};
}

std::string to_json(const msp::io::Table& t, const std::string& command, const json& resolved)
{
    // numbers go through the same %.12e formatting as the CSV
    std::string rows = "[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        rows += r ? ",\n  [" : "\n  [";
        for (std::size_t c = 0; c < t.rows[r].size(); ++c)
            rows += (c ? "," : "") + msp::io::format_cell(t, c, t.rows[r][c]);
        rows += "]";
    }
    rows += "\n]";
    json doc;
    doc["tool"] = "msp";
    doc["version"] = msp::version;
    doc["command"] = command;
    doc["params"] = resolved;
    doc["columns"] = t.columns;
    doc["rows"] = nullptr;
    std::string text = doc.dump(2);
    const std::string key = "\"rows\": null";
    text.replace(text.find(key), key.size(), "\"rows\": " + rows);
    return text + "\n";
}

void write_outputs(const Flags& fl, const json& resolved, const std::vector<Output>& outs)
{
    namespace fs = std::filesystem;
    fs::create_directories(fl.out);
    const auto comments = header(fl.command, resolved);
    for (const auto& o : outs) {
        const fs::path base = fs::path(fl.out) / o.table.name;
        if (fl.format == "csv")
            msp::io::write_file(base.string() + ".csv", msp::io::to_csv(o.table, comments));
        else
            msp::io::write_file(base.string() + ".json", to_json(o.table, fl.command, resolved));
        if (fl.svg && o.svg)
            msp::io::write_file(base.string() + ".svg", *o.svg);
    }
}

std::vector<Output> dispatch(const std::string& command, const json& resolved, const msp::CouplingParams& p)
{
    if (command == "subbands")
        return run_subbands(resolved);
    if (command == "plasmons")
        return run_plasmons(resolved);
    if (command == "gamma")
        return run_gamma(resolved);
    if (command == "critical-angle")
        return run_critical_angle(resolved);
    if (command == "spectrum")
        return run_spectrum(resolved, p);
    if (command == "peaks")
        return run_peaks(resolved, p);
    if (command == "halfmax")
        return run_halfmax(resolved, p);
    if (command == "thermal")
        return run_thermal(resolved, p);
    return run_dispersion(resolved, p);
}

void add_common(CLI::App* sub, Flags& fl)
{
    sub->add_option("--config", fl.config, "JSON config file (see schema/config.schema.json)");
    sub->add_option("--out", fl.out, "output directory")->capture_default_str();
    sub->add_option("--format", fl.format, "csv or json")->capture_default_str();
    sub->add_flag("--svg", fl.svg, "also write an SVG preview");
}

void add_coupling(CLI::App* sub, Flags& fl)
{
    sub->add_option("--g", fl.g, "coupling ratio Gamma(theta, omega0) / gamma");
    sub->add_option("--Q", fl.Q, "quality factor omega0 / gamma");
    sub->add_option("--theta-deg", fl.theta, "incidence angle in degrees");
    sub->add_option("--gamma0", fl.gamma0, "Gamma0 in units of omega0, e.g. 1/30");
    sub->add_option("--gamma", fl.gamma, "gamma in units of omega0, e.g. 1/15");
}

} // namespace

int main(int argc, char** argv)
{
    Flags fl;
    CLI::App app{"Superradiant multisubband plasmons: spectra, emission and dispersion maps"};
    app.set_version_flag("--version", std::string(msp::version));
    app.require_subcommand(1);

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"subbands", "bound states of the well: wavefunctions.csv, transitions.csv"},
        {"plasmons", "plasmon modes and absorption: modes.csv, absorption.csv"},
        {"gamma", "microscopic radiative rate versus angle: gamma.csv"},
        {"critical-angle", "critical-coupling angle versus density: critical_angle.csv"},
        {"spectrum", "t, r and alpha versus omega / omega0: spectrum.csv"},
        {"peaks", "peak alpha and |r|^2 versus g: peaks.csv"},
        {"halfmax", "half-maximum frequencies versus Gamma / omega0: halfmax.csv"},
        {"thermal", "emitted photon occupancy: thermal.csv"},
        {"dispersion", "plasmon weight map in (k, Omega): dispersion.csv"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, fl);
        const std::string n = name;
        if (n == "spectrum" || n == "peaks" || n == "halfmax" || n == "thermal" || n == "dispersion")
            add_coupling(sub, fl);
        if (n == "spectrum" || n == "peaks" || n == "halfmax")
            sub->add_option("--variant", fl.variant, "full | rwa | markov | mirror");
        if (n == "thermal") {
            sub->add_option("--Tel", fl.Tel, "electron temperature (K)");
            sub->add_option("--Tph", fl.Tph, "incident photon temperature (K)");
            sub->add_flag("--mirror", fl.mirror, "single-port geometry with a back mirror");
        }
        sub->callback([&fl, n] { fl.command = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Resolved resolved;
    try {
        resolved = resolve(fl);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const msp::Error& e) {
        std::cerr << "config error: " << e.name() << ": " << e.what() << "\n";
        return 2;
    }

    try {
        const auto outs = dispatch(fl.command, resolved.params, resolved.coupling);
        write_outputs(fl, resolved.params, outs);
    } catch (const msp::Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
