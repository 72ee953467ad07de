#include "kolmo/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "kolmo/error.hpp"
#include "kolmo/hypolab.hpp"

namespace kolmo {

using nlohmann::json;

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"run",        "decay",  "constants",  "coercivity",
                                                "infsup",     "kappa",  "convergence"};
    return names;
}

std::string to_string(Experiment e)
{
    return experiment_names()[static_cast<std::size_t>(e)];
}

std::string closest_name(const std::string& name, const std::vector<std::string>& candidates)
{
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const std::string& c : candidates) {
        // Levenshtein distance, single row.
        std::vector<std::size_t> row(c.size() + 1);
        for (std::size_t j = 0; j <= c.size(); ++j)
            row[j] = j;
        for (std::size_t i = 1; i <= name.size(); ++i) {
            std::size_t diag = row[0];
            row[0] = i;
            for (std::size_t j = 1; j <= c.size(); ++j) {
                const std::size_t up = row[j];
                row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (name[i - 1] == c[j - 1] ? 0 : 1)});
                diag = up;
            }
        }
        if (row[c.size()] < best_d) {
            best_d = row[c.size()];
            best = c;
        }
    }
    return best;
}

Experiment parse_experiment(const std::string& name)
{
    const auto& names = experiment_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw ConfigError("experiment: unknown kind '" + name + "' (did you mean '" + closest_name(name, names) + "'?)");
    return static_cast<Experiment>(it - names.begin());
}

SpaceFunction InitialCondition::function(const Domain& d) const
{
    if (preset == "zero")
        return [](double, double) { return 0.0; };
    if (preset == "constant")
        return [](double, double) { return 1.0; };
    if (preset == "sin") {
        return [d](double x, double y) {
            const double pi = std::numbers::pi;
            return std::sin(pi * (x - d.x_lo) / d.width()) * std::sin(pi * (y - d.y_lo) / d.height());
        };
    }
    if (preset == "manufactured")
        return [](double x, double y) { return manufactured_solution(x, y, 0.0); };
    if (preset == "polynomial") {
        return [t = terms](double x, double y) {
            double s = 0.0;
            for (const auto& [i, j, c] : t)
                s += c * std::pow(x, i) * std::pow(y, j);
            return s;
        };
    }
    throw ConfigError("initial: unknown preset '" + preset + "'");
}

namespace {

class Reader
{
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ConfigError("field '" + field(key) + "': " + what);
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const std::string& key) const { return j_.at(key); }

    double number(const std::string& key) const
    {
        if (!at(key).is_number())
            fail(key, "expected a number");
        const double v = at(key).get<double>();
        if (!std::isfinite(v))
            fail(key, "must be finite");
        return v;
    }

    double positive(const std::string& key) const
    {
        const double v = number(key);
        if (!(v > 0.0))
            fail(key, "must be positive");
        return v;
    }

    int integer(const std::string& key, int lo) const
    {
        if (!at(key).is_number_integer())
            fail(key, "expected an integer");
        const long long v = at(key).get<long long>();
        if (v < lo || v > 1'000'000)
            fail(key, "must be an integer >= " + std::to_string(lo));
        return static_cast<int>(v);
    }

    std::string string(const std::string& key, const std::vector<std::string>& allowed) const
    {
        if (!at(key).is_string())
            fail(key, "expected a string");
        const std::string v = at(key).get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end())
            fail(key, "unknown value '" + v + "' (did you mean '" + closest_name(v, allowed) + "'?)");
        return v;
    }

    template <class F>
    auto list(const std::string& key, F item) const
    {
        if (!at(key).is_array() || at(key).empty())
            fail(key, "expected a non-empty array");
        std::vector<decltype(item(json(), std::string()))> out;
        for (std::size_t i = 0; i < at(key).size(); ++i)
            out.push_back(item(at(key)[i], field(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    void reject_unknown(const std::set<std::string>& known) const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!known.count(it.key()))
                fail(it.key(), "unknown field (did you mean '" +
                                   closest_name(it.key(), std::vector<std::string>(known.begin(), known.end())) +
                                   "'?)");
    }

private:
    const json& j_;
    std::string path_;
};

int list_int(const json& v, const std::string& path, int lo)
{
    if (!v.is_number_integer() || v.get<long long>() < lo)
        throw ConfigError("field '" + path + "': must be an integer >= " + std::to_string(lo));
    return v.get<int>();
}

double list_positive(const json& v, const std::string& path)
{
    if (!v.is_number() || !(v.get<double>() > 0.0) || !std::isfinite(v.get<double>()))
        throw ConfigError("field '" + path + "': must be a positive number");
    return v.get<double>();
}

Domain parse_domain(const Reader& r)
{
    const json& d = r.at("domain");
    std::vector<double> v;
    if (d.is_array()) {
        if (d.size() != 4)
            r.fail("domain", "expected [x_lo, x_hi, y_lo, y_hi]");
        for (std::size_t i = 0; i < 4; ++i) {
            if (!d[i].is_number())
                r.fail("domain", "expected numbers");
            v.push_back(d[i].get<double>());
        }
    } else if (d.is_object()) {
        const Reader dr(d, r.field("domain"));
        dr.reject_unknown({"x", "y"});
        for (const char* axis : {"x", "y"}) {
            if (!dr.has(axis) || !d.at(axis).is_array() || d.at(axis).size() != 2 || !d.at(axis)[0].is_number() ||
                !d.at(axis)[1].is_number())
                dr.fail(axis, "expected [lo, hi]");
            v.push_back(d.at(axis)[0].get<double>());
            v.push_back(d.at(axis)[1].get<double>());
        }
    } else {
        r.fail("domain", "expected an array or an object");
    }
    if (!(v[1] > v[0]) || !(v[3] > v[2]))
        r.fail("domain", "bounds must satisfy lo < hi");
    return {v[0], v[1], v[2], v[3]};
}

InitialCondition parse_initial(const Reader& r)
{
    InitialCondition ic;
    const json& v = r.at("initial");
    const std::vector<std::string> presets{"zero", "constant", "sin", "manufactured"};
    if (v.is_string()) {
        ic.preset = r.string("initial", presets);
        return ic;
    }
    if (!v.is_object())
        r.fail("initial", "expected a preset name or {\"polynomial\": [[i, j, c], ...]}");
    const Reader ir(v, r.field("initial"));
    ir.reject_unknown({"preset", "polynomial"});
    if (ir.has("preset")) {
        ic.preset = ir.string("preset", presets);
        return ic;
    }
    if (!ir.has("polynomial"))
        r.fail("initial", "expected 'preset' or 'polynomial'");
    ic.preset = "polynomial";
    ic.terms = ir.list("polynomial", [](const json& t, const std::string& path) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
            !t[2].is_number() || t[0].get<int>() < 0 || t[1].get<int>() < 0)
            throw ConfigError("field '" + path + "': expected [i, j, c] with integer exponents >= 0");
        return std::array<double, 3>{t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    });
    return ic;
}

} // namespace

RunConfig parse_config(const json& j)
{
    if (!j.is_object())
        throw ConfigError("field '<root>': expected a JSON object");
    const Reader r(j, "");
    r.reject_unknown({"experiment", "domain", "nx", "ny", "p", "q", "k", "steps", "t_final", "initial", "forcing",
                      "coefficients", "out", "tolerances", "bound_weights", "test_constants", "sweep", "levels", "slabs", "samples",
                      "seed"});
    RunConfig c;
    if (r.has("experiment"))
        c.experiment = static_cast<Experiment>(
            std::find(experiment_names().begin(), experiment_names().end(), r.string("experiment", experiment_names())) -
            experiment_names().begin());
    if (!r.has("domain"))
        r.fail("domain", "required");
    c.domain = parse_domain(r);
    if (!r.has("nx"))
        r.fail("nx", "required");
    c.nx = r.integer("nx", 1);
    c.ny = r.has("ny") ? r.integer("ny", 1) : c.nx;
    if (!r.has("p"))
        r.fail("p", "required");
    c.p = r.integer("p", 0);
    if (r.has("q"))
        c.q = r.integer("q", 0);
    if (r.has("k"))
        c.k = r.positive("k");
    if (r.has("steps"))
        c.steps = r.integer("steps", 1);
    if (r.has("t_final"))
        c.t_final = r.positive("t_final");
    if (c.steps && c.t_final)
        r.fail("t_final", "give either 'steps' or 't_final', not both");
    if (r.has("initial"))
        c.initial = parse_initial(r);
    if (r.has("forcing"))
        c.forcing = r.string("forcing", {"zero", "manufactured"});
    if (r.has("coefficients"))
        c.coefficients = r.string("coefficients", {"full", "semi", "penalty"});
    if (r.has("out"))
        c.out_dir = r.string("out", {});
    if (r.has("test_constants")) {
        if (!r.at("test_constants").is_boolean())
            r.fail("test_constants", "expected a boolean");
        c.test_constants = r.at("test_constants").get<bool>();
    }
    if (r.has("tolerances")) {
        if (!r.at("tolerances").is_object())
            r.fail("tolerances", "expected an object");
        const Reader t(r.at("tolerances"), "tolerances");
        t.reject_unknown({"margin", "identity", "decay", "residual", "certificate", "eoc"});
        if (t.has("margin"))
            c.tol.margin = t.positive("margin");
        if (t.has("identity"))
            c.tol.identity = t.positive("identity");
        if (t.has("decay"))
            c.tol.decay = t.positive("decay");
        if (t.has("residual"))
            c.tol.residual = t.positive("residual");
        if (t.has("certificate"))
            c.tol.certificate = t.positive("certificate");
        if (t.has("eoc"))
            c.tol.eoc = t.positive("eoc");
    }
    if (r.has("bound_weights")) {
        if (!r.at("bound_weights").is_object())
            r.fail("bound_weights", "expected an object");
        const Reader b(r.at("bound_weights"), "bound_weights");
        b.reject_unknown({"jump_l2", "uw"});
        if (b.has("jump_l2"))
            c.weights.jump_l2 = b.positive("jump_l2");
        if (b.has("uw"))
            c.weights.uw = b.positive("uw");
    }
    if (r.has("sweep")) {
        if (!r.at("sweep").is_object())
            r.fail("sweep", "expected an object");
        const Reader s(r.at("sweep"), "sweep");
        s.reject_unknown({"n", "p", "q", "k"});
        if (s.has("n"))
            c.sweep_n = s.list("n", [](const json& v, const std::string& p) { return list_int(v, p, 1); });
        if (s.has("p"))
            c.sweep_p = s.list("p", [](const json& v, const std::string& p) { return list_int(v, p, 0); });
        if (s.has("q"))
            c.sweep_q = s.list("q", [](const json& v, const std::string& p) { return list_int(v, p, 0); });
        if (s.has("k"))
            c.sweep_k = s.list("k", [](const json& v, const std::string& p) { return list_positive(v, p); });
    }
    if (r.has("levels")) {
        c.levels = r.list("levels", [](const json& v, const std::string& p) { return list_int(v, p, 1); });
        for (std::size_t i = 1; i < c.levels.size(); ++i)
            if (c.levels[i] <= c.levels[i - 1])
                r.fail("levels", "must be strictly increasing");
    }
    if (r.has("slabs"))
        c.slabs = r.integer("slabs", 1);
    if (r.has("samples"))
        c.samples = r.integer("samples", 1);
    if (r.has("seed")) {
        if (!r.at("seed").is_number_unsigned())
            r.fail("seed", "expected a non-negative integer");
        c.seed = r.at("seed").get<unsigned long long>();
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

TimeGrid RunConfig::time_grid() const
{
    if (t_final)
        return TimeGrid::until(*t_final, k);
    return TimeGrid::uniform(k, steps.value_or(10));
}

std::vector<SweepPoint> RunConfig::sweep() const
{
    const std::vector<int> ns = sweep_n.empty() ? std::vector<int>{nx} : sweep_n;
    const std::vector<int> ps = sweep_p.empty() ? std::vector<int>{p} : sweep_p;
    const std::vector<int> qs = sweep_q.empty() ? std::vector<int>{q} : sweep_q;
    const std::vector<double> ks = sweep_k.empty() ? std::vector<double>{k} : sweep_k;
    std::vector<SweepPoint> out;
    for (int n : ns)
        for (int pp : ps)
            for (int qq : qs)
                for (double kk : ks)
                    out.push_back({n, pp, qq, kk});
    return out;
}

json RunConfig::to_json() const
{
    json j{{"experiment", to_string(experiment)},
           {"domain", {domain.x_lo, domain.x_hi, domain.y_lo, domain.y_hi}},
           {"nx", nx},
           {"ny", ny},
           {"p", p},
           {"q", q},
           {"k", k},
           {"forcing", forcing},
           {"coefficients", coefficients},
           {"test_constants", test_constants},
           {"tolerances",
            {{"margin", tol.margin},
             {"identity", tol.identity},
             {"decay", tol.decay},
             {"residual", tol.residual},
             {"certificate", tol.certificate},
             {"eoc", tol.eoc}}},
           {"bound_weights", {{"jump_l2", weights.jump_l2}, {"uw", weights.uw}}},
           {"levels", levels},
           {"slabs", slabs},
           {"samples", samples},
           {"seed", seed}};
    json sw = json::object();
    if (!sweep_n.empty())
        sw["n"] = sweep_n;
    if (!sweep_p.empty())
        sw["p"] = sweep_p;
    if (!sweep_q.empty())
        sw["q"] = sweep_q;
    if (!sweep_k.empty())
        sw["k"] = sweep_k;
    if (!sw.empty())
        j["sweep"] = sw;
    if (steps)
        j["steps"] = *steps;
    if (t_final)
        j["t_final"] = *t_final;
    j["initial"] = initial.preset == "polynomial" ? json{{"polynomial", initial.terms}} : json(initial.preset);
    return j;
}

} // namespace kolmo
