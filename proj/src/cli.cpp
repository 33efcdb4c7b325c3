#include "fminlab/cli.hpp"

#include "fminlab/errors.hpp"
#include "fminlab/identities.hpp"
#include "fminlab/spectral.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace fminlab {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(15) << v;
    return os.str();
}

std::string timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_atomic(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::filesystem::path target(path), tmp(path);
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw ArgumentError("cannot write " + tmp.string());
        os << content;
        if (!os) throw ArgumentError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

ordered_json vec_json(const Vec& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

std::string vec_text(const Vec& v) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << fmt(v(i));
    os << ")";
    return os.str();
}

// Config file values fill options not given on the command line.
class ConfigFile {
public:
    void load(const std::string& path) {
        if (path.empty()) return;
        std::ifstream is(path);
        if (!is) throw ArgumentError("cannot read config file " + path);
        try {
            j_ = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception& e) {
            throw ArgumentError("bad config file " + path + ": " + e.what());
        }
        if (!j_.is_object()) throw ArgumentError("config file must hold a JSON object");
    }

    template <class T>
    void apply(const CLI::App* sub, const std::string& key, T& var) const {
        if (!j_.contains(key) || sub->count("--" + key) > 0) return;
        try {
            var = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ArgumentError("config key '" + key + "' has the wrong type");
        }
    }

private:
    nlohmann::json j_ = nlohmann::json::object();
};

std::vector<IdentityId> parse_selection(const std::string& sel) {
    std::vector<IdentityId> ids;
    if (sel == "all") {
        for (const auto& info : list_identities()) ids.push_back(info.id);
        return ids;
    }
    std::stringstream ss(sel);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) ids.push_back(parse_identity(item));
    if (ids.empty()) throw ArgumentError("empty identity selection");
    return ids;
}

AmbientModel resolve_model(const std::string& model, const std::string& surface, int n) {
    return model.empty() ? default_model_for(surface, n) : AmbientModel::parse(model);
}

// ---- verify

struct VerifyConfig {
    std::string surface, model, identity = "all", out, format = "json", config;
    int n = 2, samples = 100;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    bool no_timestamp = false, list = false;
};

int run_verify(const VerifyConfig& c, std::ostream& out, std::ostream& err) {
    if (c.list) {
        std::ostringstream os;
        for (const auto& info : list_identities())
            os << std::left << std::setw(16) << info.name << std::setw(28) << to_string(info.model) << "order "
               << info.jet_order << "  " << info.anchor << "\n";
        write_atomic(c.out, os.str(), out);
        return kExitOk;
    }
    if (c.surface.empty()) throw ArgumentError("--surface is required");
    if (!(c.tol > 0)) throw ArgumentError("--tol must be positive");
    if (c.samples < 1) throw ArgumentError("--samples must be >= 1");
    if (c.format != "json" && c.format != "csv") throw ArgumentError("--format must be json or csv");
    std::vector<IdentityId> ids = parse_selection(c.identity);
    AmbientModel model = resolve_model(c.model, c.surface, c.n);
    ImmersionChart chart = make_chart(c.surface, model);

    std::vector<IdentityId> run_ids;
    for (IdentityId id : ids)
        if (is_compatible(id, model)) run_ids.push_back(id);
    std::vector<Vec> pts = sample_points(chart, c.samples, c.seed);
    std::vector<ResidualReport> reports;
    if (!run_ids.empty()) reports = check_identities(run_ids, chart, pts, c.tol);

    bool all_pass = true;
    ordered_json j;
    j["tool"] = "fminlab";
    j["command"] = "verify";
    if (!c.no_timestamp) j["timestamp"] = timestamp();
    j["surface"] = chart.label;
    j["model"] = model.name();
    j["n"] = model.n;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["tol"] = c.tol;
    ordered_json list = ordered_json::array();
    std::ostringstream csv;
    csv << "identity,status,max_residual,tol,anchor\n";
    std::size_t r = 0;
    for (IdentityId id : ids) {
        const IdentityInfo& info = identity_info(id);
        ordered_json e;
        e["identity"] = info.name;
        e["anchor"] = info.anchor;
        e["requires"] = to_string(info.model);
        if (!is_compatible(id, model)) {
            e["status"] = "skipped";
            e["reason"] = "needs a " + to_string(info.model) + " model, run uses " + model.name();
            csv << info.name << ",skipped,,," << '"' << info.anchor << '"' << "\n";
            list.push_back(e);
            continue;
        }
        const ResidualReport& rep = reports[r++];
        std::size_t worst = 0;
        for (std::size_t i = 0; i < rep.samples.size(); ++i)
            if (!(rep.samples[i].residual <= rep.samples[worst].residual)) worst = i;
        e["status"] = rep.pass ? "pass" : "fail";
        e["max_residual"] = rep.max_residual;
        e["worst_point"] = vec_json(rep.samples[worst].u);
        ordered_json pj = ordered_json::array();
        for (const auto& s : rep.samples)
            pj.push_back({{"u", vec_json(s.u)}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"residual", s.residual}});
        e["points"] = pj;
        list.push_back(e);
        csv << info.name << "," << (rep.pass ? "pass" : "fail") << "," << fmt(rep.max_residual) << "," << fmt(c.tol)
            << "," << '"' << info.anchor << '"' << "\n";
        if (!rep.pass) {
            all_pass = false;
            err << "FAIL " << info.name << " on " << chart.label << ": residual " << fmt(rep.max_residual)
                << " at u = " << vec_text(rep.samples[worst].u) << "\n";
        }
    }
    j["identities"] = list;
    j["pass"] = all_pass;
    write_atomic(c.out, c.format == "json" ? j.dump(2) + "\n" : csv.str(), out);
    return all_pass ? kExitOk : kExitCheckFailed;
}

// ---- spectrum

struct SpectrumConfig {
    std::string surface = "slice", model, method = "numeric", out, format = "csv", config;
    int n = 2, kmax = 10, mmax = -1, grid = 2000;
    bool no_timestamp = false;
};

ProfileCurve slice_profile(const AmbientModel& model) {
    return integrate_profile({0.0, 0.0, 0.0}, model.a * 1e-3, 2 * M_PI * model.a, model);
}

std::string spectrum_text(const SpectrumResult& S, const std::string& format, bool stamp) {
    if (format == "json") {
        ordered_json j;
        j["tool"] = "fminlab";
        j["command"] = "spectrum";
        if (stamp) j["timestamp"] = timestamp();
        j["label"] = S.label;
        j["convention"] = S.convention;
        j["range_closed"] = S.range_closed;
        j["index"] = S.index;
        j["m_max"] = S.m_max;
        j["grid"] = S.grid;
        ordered_json ev = ordered_json::array();
        for (const auto& e : S.eigenvalues)
            ev.push_back({{"mode", e.mode}, {"k", e.k}, {"mu", e.mu}, {"multiplicity", e.multiplicity}});
        j["eigenvalues"] = ev;
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "mode,k,mu,multiplicity\n";
    for (const auto& e : S.eigenvalues) os << e.mode << "," << e.k << "," << fmt(e.mu) << "," << e.multiplicity << "\n";
    os << "# convention=" << S.convention << "\n";
    os << "# index=" << S.index << "\n";
    return os.str();
}

int run_spectrum(const SpectrumConfig& c, std::ostream& out, std::ostream&) {
    if (c.format != "json" && c.format != "csv") throw ArgumentError("--format must be json or csv");
    if (c.method != "numeric" && c.method != "closed") throw ArgumentError("--method must be numeric or closed");
    if (c.kmax < 0) throw ArgumentError("--kmax must be >= 0");
    SpectrumResult S;
    if (c.surface == "slice") {
        AmbientModel model = resolve_model(c.model, c.surface, c.n);
        if (c.method == "closed") {
            S = slice_spectrum_closed_form(model, c.kmax);
        } else {
            S = sturm_liouville_spectrum(slice_profile(model), {c.mmax >= 0 ? c.mmax : c.kmax, c.grid, true});
            S.label = "slice(" + model.name() + ") Sturm-Liouville";
        }
    } else if (c.surface.rfind("profile:", 0) == 0) {
        if (c.method == "closed") throw ArgumentError("closed form exists only for the slice");
        ProfileCurve P = load_profile(c.surface.substr(8));
        S = c.mmax >= 0 ? sturm_liouville_spectrum(P, {c.mmax, c.grid, true})
                        : sturm_liouville_spectrum_closed(P, c.grid);
    } else {
        throw ArgumentError("spectrum needs --surface slice or profile:<file>");
    }
    lf_index(S);
    write_atomic(c.out, spectrum_text(S, c.format, !c.no_timestamp), out);
    return kExitOk;
}

// ---- generate

struct GenerateConfig {
    bool shoot = false;
    double tstart = 0, a = 0, step = 0, max_length = 0;
    int n = 3;
    std::string out, config;
};

int run_generate(const GenerateConfig& c, std::ostream& out, std::ostream& err) {
    if (c.out.empty()) throw ArgumentError("--out is required");
    AmbientModel model = c.a > 0 ? AmbientModel::cylinder(c.n, c.a) : AmbientModel::cylinder(c.n);
    ShootConfig cfg;
    cfg.step = c.step;
    cfg.max_length = c.max_length;
    if (c.shoot) {
        ShootResult r = shoot_closed(c.tstart, model, cfg);
        if (!r.found) {
            err << "no closed profile found near t = " << fmt(c.tstart) << " after " << r.trace.size() << " shots\n";
            return kExitCheckFailed;
        }
        save_profile(*r.profile, c.out);
        err << "closed profile: t_axis = " << fmt(r.profile->t_start) << ", length = " << fmt(r.profile->length())
            << ", closure defect = " << fmt(r.profile->closure_defect) << "\n";
        return kExitOk;
    }
    double h = c.step > 0 ? c.step : model.a * 1e-3;
    double L = c.max_length > 0 ? c.max_length : 8 * M_PI * model.a;
    ProfileCurve P = integrate_profile({0.0, c.tstart, 0.0}, h, L, model);
    save_profile(P, c.out);
    (void)out;
    return kExitOk;
}

// ---- integrals

struct IntegralsConfig {
    std::string profile, out, config;
    double tol = 1e-6;
    bool no_timestamp = false;
};

ordered_json integrals_json(const ProfileCurve& P, double tol, bool& pass) {
    ordered_json j;
    j["model"] = P.model.name();
    j["length"] = P.length();
    j["closed"] = P.closed;
    j["fminimality_defect"] = profile_fminimality_defect(P);
    j["weighted_volume"] = weighted_volume(P);
    LemmaResiduals L = lemma_residuals(P);
    j["lemma_residuals"] = {{"r1", L.r1}, {"r2", L.r2}, {"r3", L.r3}};
    double rq = rayleigh_quotient(P, ScalarField::of(FieldKind::alpha));
    j["rayleigh_alpha"] = rq;
    j["distance_to_slice"] = distance_to_slice(P);
    if (P.model.n >= 3) {
        BandVerdict v = band_verdict(P);
        j["band"] = {{"inside_everywhere", v.inside_everywhere}, {"violations", v.violations},
                     {"checked", v.checked},                     {"worst_excess", v.worst_excess},
                     {"worst_s", v.worst_s},                     {"max_A2", v.max_A2}};
    } else {
        j["band"] = nullptr;
    }
    pass = L.r1 <= tol && L.r2 <= tol && L.r3 <= tol && std::abs(rq + 0.5) <= 1e-8;
    j["tol"] = tol;
    j["pass"] = pass;
    return j;
}

int run_integrals(const IntegralsConfig& c, std::ostream& out, std::ostream& err) {
    if (c.profile.empty()) throw ArgumentError("--profile is required");
    if (!(c.tol > 0)) throw ArgumentError("--tol must be positive");
    ProfileCurve P = load_profile(c.profile);
    bool pass = false;
    ordered_json j;
    j["tool"] = "fminlab";
    j["command"] = "integrals";
    if (!c.no_timestamp) j["timestamp"] = timestamp();
    j["profile"] = c.profile;
    j.update(integrals_json(P, c.tol, pass));
    write_atomic(c.out, j.dump(2) + "\n", out);
    if (!pass) err << "FAIL integrals on " << c.profile << "\n";
    return pass ? kExitOk : kExitCheckFailed;
}

// ---- report: every built-in chart for the dimension plus the slice spectrum and integrals

struct ReportConfig {
    int n = 2, samples = 100, grid = 2000, kmax = 10;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::string out, config;
    bool no_timestamp = false;
};

int run_report(const ReportConfig& c, std::ostream& out, std::ostream& err) {
    if (!(c.tol > 0)) throw ArgumentError("--tol must be positive");
    bool pass = true;
    ordered_json j;
    j["tool"] = "fminlab";
    j["command"] = "report";
    if (!c.no_timestamp) j["timestamp"] = timestamp();
    j["n"] = c.n;
    ordered_json charts = ordered_json::array();
    std::vector<IdentityId> all;
    for (const auto& info : list_identities()) all.push_back(info.id);
    for (const std::string& name : builtin_chart_names()) {
        AmbientModel model = default_model_for(name, c.n);
        ImmersionChart chart = make_chart(name, model);
        std::vector<IdentityId> ids;
        for (IdentityId id : all)
            if (is_compatible(id, model)) ids.push_back(id);
        auto reps = check_identities(ids, chart, sample_points(chart, c.samples, c.seed), c.tol);
        ordered_json cj;
        cj["surface"] = chart.label;
        cj["model"] = model.name();
        ordered_json rows = ordered_json::array();
        for (const auto& r : reps) {
            const IdentityInfo& info = identity_info(r.identity);
            rows.push_back({{"identity", info.name},
                            {"anchor", info.anchor},
                            {"status", r.pass ? "pass" : "fail"},
                            {"max_residual", r.max_residual}});
            if (!r.pass) {
                pass = false;
                err << "FAIL " << info.name << " on " << chart.label << ": residual " << fmt(r.max_residual) << "\n";
            }
        }
        cj["identities"] = rows;
        charts.push_back(cj);
    }
    j["charts"] = charts;

    AmbientModel cyl = AmbientModel::cylinder(c.n);
    ProfileCurve slice = slice_profile(cyl);
    SpectrumResult S = sturm_liouville_spectrum(slice, {c.kmax, c.grid, true});
    SpectrumResult exact = slice_spectrum_closed_form(cyl, c.kmax);
    double worst = 0;
    for (const auto& e : S.eigenvalues) {
        int k = e.mode + e.k;
        if (k <= c.kmax) worst = std::max(worst, std::abs(e.mu - exact.eigenvalues[k].mu));
    }
    int index = lf_index(S);
    j["slice_spectrum"] = {{"convention", S.convention},
                           {"index", index},
                           {"max_deviation_from_closed_form", worst},
                           {"lowest", S.eigenvalues.front().mu}};
    if (index != 1 || worst > 1e-6) {
        pass = false;
        err << "FAIL slice spectrum: index " << index << ", deviation " << fmt(worst) << "\n";
    }
    bool ipass = false;
    j["slice_integrals"] = integrals_json(slice, 1e-6, ipass);
    if (!ipass) {
        pass = false;
        err << "FAIL slice integrals\n";
    }
    j["pass"] = pass;
    write_atomic(c.out, j.dump(2) + "\n", out);
    return pass ? kExitOk : kExitCheckFailed;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"fminlab: numerical checks for f-minimal hypersurfaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fminlab 1.0");

    VerifyConfig vc;
    auto* verify = app.add_subcommand("verify", "Check identities on a surface at sample points");
    verify->add_option("--surface", vc.surface, "slice, equator-cylinder, shrinker-sphere, shrinker-cylinder, "
                                                "graph:<file>, profile:<file>");
    verify->add_option("--model", vc.model, "gaussian:n or cylinder:n[:a]; default depends on the surface");
    verify->add_option("--n", vc.n, "hypersurface dimension");
    verify->add_option("--identity", vc.identity, "all or a comma-separated list");
    verify->add_option("--samples", vc.samples, "number of sample points");
    verify->add_option("--tol", vc.tol, "residual tolerance");
    verify->add_option("--seed", vc.seed, "random shift of the quasi-random points; 0 = none");
    verify->add_option("--out", vc.out, "report file (default stdout)");
    verify->add_option("--format", vc.format, "json or csv");
    verify->add_flag("--no-timestamp", vc.no_timestamp, "omit the timestamp field");
    verify->add_option("--config", vc.config, "JSON file with option values");
    verify->add_flag("--list-identities", vc.list, "print the identity catalog and exit");

    SpectrumConfig sc;
    auto* spectrum = app.add_subcommand("spectrum", "Spectrum and index of L_f");
    spectrum->add_option("--surface", sc.surface, "slice or profile:<file>");
    spectrum->add_option("--model", sc.model, "cylinder:n[:a]");
    spectrum->add_option("--n", sc.n, "hypersurface dimension");
    spectrum->add_option("--kmax", sc.kmax, "highest degree (slice) and default highest orbit mode");
    spectrum->add_option("--mmax", sc.mmax, "highest orbit mode; default: kmax for the slice, adaptive for profiles");
    spectrum->add_option("--grid", sc.grid, "cells per mode");
    spectrum->add_option("--method", sc.method, "numeric or closed");
    spectrum->add_option("--out", sc.out, "output file (default stdout)");
    spectrum->add_option("--format", sc.format, "csv or json");
    spectrum->add_flag("--no-timestamp", sc.no_timestamp, "omit the timestamp field");
    spectrum->add_option("--config", sc.config, "JSON file with option values");

    GenerateConfig gc;
    auto* generate = app.add_subcommand("generate", "Integrate or shoot a rotational profile");
    generate->add_flag("--shoot", gc.shoot, "search for a closed profile near --tstart");
    generate->add_option("--tstart", gc.tstart, "height where the profile leaves the axis");
    generate->add_option("--n", gc.n, "hypersurface dimension");
    generate->add_option("--a", gc.a, "cylinder radius; default sqrt(2(n-1))");
    generate->add_option("--step", gc.step, "RK4 step; default a * 1e-3");
    generate->add_option("--max-length", gc.max_length, "arclength limit; default 8 pi a");
    generate->add_option("--out", gc.out, "profile file");
    generate->add_option("--config", gc.config, "JSON file with option values");

    IntegralsConfig ic;
    auto* integrals = app.add_subcommand("integrals", "Weighted integrals on a closed profile");
    integrals->add_option("--profile", ic.profile, "profile file");
    integrals->add_option("--tol", ic.tol, "tolerance for the integral residuals");
    integrals->add_option("--out", ic.out, "report file (default stdout)");
    integrals->add_flag("--no-timestamp", ic.no_timestamp, "omit the timestamp field");
    integrals->add_option("--config", ic.config, "JSON file with option values");

    ReportConfig rc;
    auto* report = app.add_subcommand("report", "All built-in checks for one dimension");
    report->add_option("--n", rc.n, "hypersurface dimension");
    report->add_option("--samples", rc.samples, "sample points per chart");
    report->add_option("--tol", rc.tol, "identity tolerance");
    report->add_option("--seed", rc.seed, "random shift of the quasi-random points");
    report->add_option("--grid", rc.grid, "spectrum cells per mode");
    report->add_option("--kmax", rc.kmax, "highest slice degree compared");
    report->add_option("--out", rc.out, "report file (default stdout)");
    report->add_flag("--no-timestamp", rc.no_timestamp, "omit the timestamp field");
    report->add_option("--config", rc.config, "JSON file with option values");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        ConfigFile cf;
        if (verify->parsed()) {
            cf.load(vc.config);
            cf.apply(verify, "surface", vc.surface);
            cf.apply(verify, "model", vc.model);
            cf.apply(verify, "n", vc.n);
            cf.apply(verify, "identity", vc.identity);
            cf.apply(verify, "samples", vc.samples);
            cf.apply(verify, "tol", vc.tol);
            cf.apply(verify, "seed", vc.seed);
            cf.apply(verify, "out", vc.out);
            cf.apply(verify, "format", vc.format);
            cf.apply(verify, "no-timestamp", vc.no_timestamp);
            return run_verify(vc, out, err);
        }
        if (spectrum->parsed()) {
            cf.load(sc.config);
            cf.apply(spectrum, "surface", sc.surface);
            cf.apply(spectrum, "model", sc.model);
            cf.apply(spectrum, "n", sc.n);
            cf.apply(spectrum, "kmax", sc.kmax);
            cf.apply(spectrum, "mmax", sc.mmax);
            cf.apply(spectrum, "grid", sc.grid);
            cf.apply(spectrum, "method", sc.method);
            cf.apply(spectrum, "out", sc.out);
            cf.apply(spectrum, "format", sc.format);
            cf.apply(spectrum, "no-timestamp", sc.no_timestamp);
            return run_spectrum(sc, out, err);
        }
        if (generate->parsed()) {
            cf.load(gc.config);
            cf.apply(generate, "shoot", gc.shoot);
            cf.apply(generate, "tstart", gc.tstart);
            cf.apply(generate, "n", gc.n);
            cf.apply(generate, "a", gc.a);
            cf.apply(generate, "step", gc.step);
            cf.apply(generate, "max-length", gc.max_length);
            cf.apply(generate, "out", gc.out);
            return run_generate(gc, out, err);
        }
        if (integrals->parsed()) {
            cf.load(ic.config);
            cf.apply(integrals, "profile", ic.profile);
            cf.apply(integrals, "tol", ic.tol);
            cf.apply(integrals, "out", ic.out);
            cf.apply(integrals, "no-timestamp", ic.no_timestamp);
            return run_integrals(ic, out, err);
        }
        cf.load(rc.config);
        cf.apply(report, "n", rc.n);
        cf.apply(report, "samples", rc.samples);
        cf.apply(report, "tol", rc.tol);
        cf.apply(report, "seed", rc.seed);
        cf.apply(report, "grid", rc.grid);
        cf.apply(report, "kmax", rc.kmax);
        cf.apply(report, "out", rc.out);
        cf.apply(report, "no-timestamp", rc.no_timestamp);
        return run_report(rc, out, err);
    } catch (const ArgumentError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "check failed: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const Error& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "file error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace fminlab
