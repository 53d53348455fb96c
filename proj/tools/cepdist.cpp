#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cepdist/cepdist.hpp"

namespace fs = std::filesystem;
using namespace cepdist;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_tolerance = 3;
constexpr int exit_phase_gate = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotMinimumPhaseStable:
        case ErrorCode::WrongPhaseType:
        case ErrorCode::MixedPhaseUnsupported: return exit_phase_gate;
        case ErrorCode::NotConverged: return exit_tolerance;
        default: return exit_validation;
    }
}

/// Writes to the named file, or stdout for "" and "-".
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) detail::fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

json report_header(const std::string& command) {
    return {{"schema_version", report_schema_version}, {"command", command}};
}

void emit(const json& report, const RunConfig& config, const std::string& path = "") {
    Sink sink(path);
    auto& out = sink.stream();
    if (config.format == "json") {
        out << report.dump(2) << '\n';
        return;
    }
    for (const auto& [key, value] : report.items())
        out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<SignalRecord> read_dataset(const std::string& dir) {
    if (!fs::is_directory(dir)) detail::fail(ErrorCode::InvalidArgument, "'" + dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<SignalRecord> records;
    for (const auto& p : files) {
        auto f = io::read_signal_csv(p.string());
        records.push_back({p.stem().string(), std::move(f.output), std::move(f.input)});
    }
    return records;
}

DistanceConfig distance_config(const RunConfig& config) {
    return {config.estimator(), config.K, config.hankel_rows, config.estimated_classifier()};
}

void write_matrix_csv(std::ostream& out, const DistanceMatrix& dm) {
    out << "id";
    for (const auto& id : dm.ids) out << ',' << id;
    out << '\n';
    for (std::size_t a = 0; a < dm.size(); ++a) {
        out << dm.ids[a];
        for (std::size_t b = 0; b < dm.size(); ++b) {
            const double v = dm.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            out << ',' << (std::isnan(v) ? std::string("nan") : io::format_double(v));
        }
        out << '\n';
    }
}

json failures_json(const DistanceMatrix& dm) {
    json arr = json::array();
    for (const auto& f : dm.failures)
        arr.push_back({{"first", dm.ids[f.first]},
                       {"second", dm.ids[f.second]},
                       {"code", std::string(to_string(f.code))},
                       {"message", f.message}});
    return arr;
}

json verdict_json(const PhaseVerdict& v) {
    return {{"verdict", std::string(to_string(v.kind))},
            {"positive_energy", v.positive_energy},
            {"negative_energy", v.negative_energy},
            {"threshold", v.threshold}};
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string model;
    std::string input = "white";
    std::string output;
    bool pair = false;
    bool two_sided = false;
};

int cmd_simulate(const SimulateArgs& args, const RunConfig& config) {
    const auto spec = io::read_model(args.model);
    Signal u = [&] {
        if (args.input == "white") return white_noise(config.length, config.seed);
        if (args.input == "impulse") return impulse(config.length);
        auto f = io::read_signal_csv(args.input);
        return f.output;
    }();
    std::optional<Signal> y;
    if (const auto* zpk = std::get_if<ZeroPoleGain>(&spec)) {
        if (!zpk->unstable_poles().empty() && !args.two_sided)
            detail::fail(ErrorCode::InvalidArgument,
                         "model has unstable poles; time-domain recursion diverges. Use --two-sided for the "
                         "bounded anticausal response or evaluate the model in the frequency domain "
                         "(verify --case max-phase)");
        y = filter_zpk(*zpk, u);
    } else {
        const auto& ss = std::get<StateSpaceModel>(spec);
        if (spectral_radius(ss.A()) >= 1.0)
            detail::fail(ErrorCode::InvalidArgument,
                         "state matrix is not stable; time-domain recursion diverges. Evaluate the model in the "
                         "frequency domain instead");
        y = simulate(ss, u);
    }
    Sink sink(args.output);
    if (args.pair) io::write_pair_csv(sink.stream(), u, *y);
    else io::write_signal_csv(sink.stream(), *y);
    return exit_ok;
}

struct CepstrumArgs {
    std::string file;
    std::string kind = "power";
    std::string output;
};

int cmd_cepstrum(const CepstrumArgs& args, const RunConfig& config) {
    const auto f = io::read_signal_csv(args.file);
    std::optional<CepstrumSequence> c;
    if (args.kind == "power") {
        c = f.input ? transfer_cepstrum_from_io(*f.input, f.output, config.estimator(), config.K)
                    : power_cepstrum_of_signal(f.output, config.estimator(), config.K);
    } else if (args.kind == "complex") {
        c = f.input ? transfer_complex_cepstrum_from_io(*f.input, f.output, config.estimator(), config.K)
                    : complex_cepstrum(f.output, detail::next_power_of_two(f.output.size()), config.K);
    } else {
        detail::fail(ErrorCode::InvalidArgument, "kind must be 'power' or 'complex'");
    }
    Sink sink(args.output);
    auto& out = sink.stream();
    out << "k,value\n";
    const int lo = c->kind() == CepstrumKind::power ? 0 : -c->order();
    for (int k = lo; k <= c->order(); ++k) out << k << ',' << io::format_double((*c)(k)) << '\n';
    return exit_ok;
}

struct DistanceArgs {
    std::string first;
    std::string second;
    std::string metric = "cepstral";
    std::string output;
};

int cmd_distance(const DistanceArgs& args, const RunConfig& config) {
    const auto metric = parse_metric(args.metric);
    const auto a = io::read_signal_csv(args.first);
    const auto b = io::read_signal_csv(args.second);
    auto report = report_header("distance");
    report["metric"] = std::string(to_string(metric));
    report["first"] = args.first;
    report["second"] = args.second;
    switch (metric) {
        case Metric::euclidean: report["value"] = euclidean_distance(a.output, b.output); break;
        case Metric::cosine: {
            const double s = cosine_similarity(a.output, b.output);
            report["similarity"] = s;
            report["value"] = 1.0 - s;
            break;
        }
        case Metric::cepstral: {
            auto cep = [&](const io::SignalFile& f) {
                return f.input ? transfer_cepstrum_from_io(*f.input, f.output, config.estimator(), config.K)
                               : power_cepstrum_of_signal(f.output, config.estimator(), config.K);
            };
            const auto r = weighted_cepstral_distance(cep(a), cep(b));
            report["value"] = r.squared_value;
            report["distance"] = r.value();
            report["order"] = r.order;
            report["tail_bound"] = number(r.tail_bound);
            break;
        }
        case Metric::subspace: {
            if (!a.input || !b.input)
                detail::fail(ErrorCode::InvalidArgument, "subspace metric needs t,u,y pair files");
            for (const auto* f : {&a, &b}) {
                const auto v = classify_from_io(*f->input, f->output, config.estimator(), config.estimated_classifier());
                if (v.kind != PhaseKind::MinimumPhaseStable)
                    detail::fail(ErrorCode::NotMinimumPhaseStable,
                                 "phase test returned " + std::string(to_string(v.kind)) +
                                     "; the subspace interpretation needs minimum-phase stable data");
            }
            report["value"] = subspace_distance_from_data(*a.input, a.output, *b.input, b.output, config.hankel_rows);
            break;
        }
    }
    emit(report, config, args.output);
    return exit_ok;
}

struct ClassifyArgs {
    std::vector<std::string> files;
    std::string output;
};

int cmd_classify(const ClassifyArgs& args, const RunConfig& config) {
    Signal u = impulse(1), y = impulse(1);
    if (args.files.size() == 1) {
        auto f = io::read_signal_csv(args.files[0]);
        if (!f.input) detail::fail(ErrorCode::InvalidArgument, "single-file classify needs a t,u,y pair file");
        u = *f.input;
        y = f.output;
    } else if (args.files.size() == 2) {
        u = io::read_signal_csv(args.files[0]).output;
        y = io::read_signal_csv(args.files[1]).output;
    } else {
        detail::fail(ErrorCode::InvalidArgument, "classify takes a pair file or an input file and an output file");
    }
    auto report = report_header("classify");
    report.update(verdict_json(classify_from_io(u, y, config.estimator(), config.estimated_classifier())));
    report["K_test"] = config.K_test;
    emit(report, config, args.output);
    return exit_ok;
}

struct VerifyArgs {
    std::vector<std::string> cases;
    std::string output;
};

int cmd_verify(const VerifyArgs& args, const RunConfig& config) {
    std::vector<std::string> cases = args.cases;
    if (cases.empty() || (cases.size() == 1 && cases[0] == "all")) cases = verify_case_names();
    auto report = report_header("verify");
    report["seed"] = config.seed;
    report["length"] = config.length;
    json results = json::array();
    bool ok = true;
    for (const auto& name : cases) {
        const auto r = run_verify_case(name, config);
        ok = ok && r.passed();
        results.push_back(to_json(r));
    }
    report["cases"] = results;
    report["passed"] = ok;
    emit(report, config, args.output);
    return ok ? exit_ok : exit_tolerance;
}

struct MatrixArgs {
    std::string dir;
    std::string metric = "cepstral";
    std::string output;
    std::string matrix;
    std::string linkage = "average";
    int k = 2;
};

int cmd_distmat(const MatrixArgs& args, const RunConfig& config) {
    const auto dm = distance_matrix(read_dataset(args.dir), parse_metric(args.metric), distance_config(config));
    {
        Sink sink(args.output);
        write_matrix_csv(sink.stream(), dm);
    }
    for (const auto& f : dm.failures)
        std::cerr << "warning: " << dm.ids[f.first] << " vs " << dm.ids[f.second] << ": " << f.message << '\n';
    return exit_ok;
}

int cmd_cluster(const MatrixArgs& args, const RunConfig& config) {
    const auto dm = distance_matrix(read_dataset(args.dir), parse_metric(args.metric), distance_config(config));
    const auto linkage = parse_linkage(args.linkage);
    const auto result = agglomerative_cluster(dm, linkage, args.k);
    if (!args.matrix.empty()) {
        Sink sink(args.matrix);
        write_matrix_csv(sink.stream(), dm);
    }
    auto report = report_header("cluster");
    report["metric"] = std::string(to_string(dm.metric));
    report["linkage"] = std::string(to_string(linkage));
    report["k"] = args.k;
    json labels = json::array();
    for (std::size_t a = 0; a < dm.size(); ++a) labels.push_back({{"id", dm.ids[a]}, {"label", result.labels[a]}});
    report["labels"] = labels;
    report["merge_heights"] = result.merge_heights;
    json excluded = json::array();
    for (std::size_t a : result.excluded) excluded.push_back(dm.ids[a]);
    report["excluded"] = excluded;
    report["failures"] = failures_json(dm);
    emit(report, config, args.output);
    return exit_ok;
}

void add_global_options(CLI::App& app, RunConfig& c) {
    app.set_config("--config", "", "key=value configuration file");
    app.add_option("--method", c.method, "spectrum estimator: welch or periodogram")->envname("CEPDIST_METHOD");
    app.add_option("--window", c.window, "Welch window length (0 = automatic)")->envname("CEPDIST_WINDOW");
    app.add_option("--overlap", c.overlap, "Welch overlap fraction")->envname("CEPDIST_OVERLAP");
    app.add_option("--fft-length", c.fft_length, "FFT length (0 = automatic)")->envname("CEPDIST_FFT_LENGTH");
    app.add_option("--K", c.K, "cepstrum order")->envname("CEPDIST_K");
    app.add_option("--K-test", c.K_test, "coefficients used by the phase test")->envname("CEPDIST_K_TEST");
    app.add_option("--tol-model", c.tol_model, "phase test tolerance, exact cepstra")->envname("CEPDIST_TOL_MODEL");
    app.add_option("--tol-estimated", c.tol_estimated, "phase test tolerance, estimated cepstra")
        ->envname("CEPDIST_TOL_ESTIMATED");
    app.add_option("--rows", c.observability_rows, "observability truncation j")->envname("CEPDIST_ROWS");
    app.add_option("--hankel-rows", c.hankel_rows, "Hankel block rows i")->envname("CEPDIST_HANKEL_ROWS");
    app.add_option("--seed", c.seed, "random seed")->envname("CEPDIST_SEED");
    app.add_option("--length", c.length, "generated signal length")->envname("CEPDIST_LENGTH");
    app.add_option("--format", c.format, "report format: json or text")->envname("CEPDIST_FORMAT");
    app.add_option("--tol-data", c.verify.data_relative, "verify: relative data-path tolerance")
        ->envname("CEPDIST_TOL_DATA");
    app.add_option("--tol-closed-form", c.verify.model_absolute, "verify: model vs closed-form tolerance")
        ->envname("CEPDIST_TOL_CLOSED_FORM");
    app.add_option("--tol-spectrum", c.verify.spectrum_absolute, "verify: frequency-sample tolerance")
        ->envname("CEPDIST_TOL_SPECTRUM");
    app.add_option("--tol-model-relative", c.verify.model_relative, "verify: relative model tolerance")
        ->envname("CEPDIST_TOL_MODEL_RELATIVE");
    app.add_option("--tol-cascade", c.verify.cascade_absolute, "verify: cascade identity tolerance")
        ->envname("CEPDIST_TOL_CASCADE");
    app.add_option("--tol-white-noise", c.verify.white_noise_absolute, "verify: white-noise cepstrum tolerance")
        ->envname("CEPDIST_TOL_WHITE_NOISE");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cepstral and subspace distances between time series"};
    app.require_subcommand(1);
    RunConfig config;
    add_global_options(app, config);

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "simulate a model and write a CSV signal");
    simulate_cmd->fallthrough();
    simulate_cmd->add_option("--model", sim.model, "model JSON file")->required();
    simulate_cmd->add_option("--input", sim.input, "white, impulse or a CSV file");
    simulate_cmd->add_option("-o,--output", sim.output, "output CSV (default stdout)");
    simulate_cmd->add_flag("--pair", sim.pair, "write t,u,y instead of t,value");
    simulate_cmd->add_flag("--two-sided", sim.two_sided, "apply unstable poles anticausally");

    CepstrumArgs cep;
    auto* cepstrum_cmd = app.add_subcommand("cepstrum", "write cepstrum coefficients as k,value CSV");
    cepstrum_cmd->fallthrough();
    cepstrum_cmd->add_option("file", cep.file, "signal or pair CSV")->required();
    cepstrum_cmd->add_option("--kind", cep.kind, "power or complex");
    cepstrum_cmd->add_option("-o,--output", cep.output, "output CSV (default stdout)");

    DistanceArgs dist;
    auto* distance_cmd = app.add_subcommand("distance", "distance between two signals");
    distance_cmd->fallthrough();
    distance_cmd->add_option("first", dist.first)->required();
    distance_cmd->add_option("second", dist.second)->required();
    distance_cmd->add_option("--metric", dist.metric, "euclidean, cosine, cepstral or subspace");
    distance_cmd->add_option("-o,--output", dist.output, "report file (default stdout)");

    ClassifyArgs cls;
    auto* classify_cmd = app.add_subcommand("classify", "phase type of the system behind an input/output pair");
    classify_cmd->fallthrough();
    classify_cmd->add_option("files", cls.files, "pair CSV, or input CSV and output CSV")->required();
    classify_cmd->add_option("-o,--output", cls.output, "report file (default stdout)");

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify", "check the norm equivalences on generated data");
    verify_cmd->fallthrough();
    verify_cmd->add_option("--case", ver.cases, "min-phase, max-phase, mixed, cascade, white-noise or all");
    verify_cmd->add_option("-o,--output", ver.output, "report file (default stdout)");

    MatrixArgs mat;
    auto* distmat_cmd = app.add_subcommand("distmat", "pairwise distance matrix of a directory of CSV files");
    distmat_cmd->fallthrough();
    distmat_cmd->add_option("dir", mat.dir)->required();
    distmat_cmd->add_option("--metric", mat.metric, "euclidean, cosine, cepstral or subspace");
    distmat_cmd->add_option("-o,--output", mat.output, "matrix CSV (default stdout)");

    auto* cluster_cmd = app.add_subcommand("cluster", "agglomerative clustering of a directory of CSV files");
    cluster_cmd->fallthrough();
    cluster_cmd->add_option("dir", mat.dir)->required();
    cluster_cmd->add_option("--metric", mat.metric, "euclidean, cosine, cepstral or subspace");
    cluster_cmd->add_option("--k", mat.k, "number of clusters");
    cluster_cmd->add_option("--linkage", mat.linkage, "single, average or complete");
    cluster_cmd->add_option("--matrix", mat.matrix, "also write the distance matrix CSV");
    cluster_cmd->add_option("-o,--output", mat.output, "labels report (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        config.validate();
        if (*simulate_cmd) return cmd_simulate(sim, config);
        if (*cepstrum_cmd) return cmd_cepstrum(cep, config);
        if (*distance_cmd) return cmd_distance(dist, config);
        if (*classify_cmd) return cmd_classify(cls, config);
        if (*verify_cmd) return cmd_verify(ver, config);
        if (*distmat_cmd) return cmd_distmat(mat, config);
        if (*cluster_cmd) return cmd_cluster(mat, config);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    }
    return exit_validation;
}
