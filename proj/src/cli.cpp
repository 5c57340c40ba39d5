#include "weibrec/cli.hpp"

#include "weibrec/errors.hpp"
#include "weibrec/gpq.hpp"
#include "weibrec/io.hpp"
#include "weibrec/weibull.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weibrec {

namespace {

using Json = nlohmann::ordered_json;

enum class Format { json, csv, text };

struct Options {
    std::string data_path;
    std::string records_path;
    std::string format = "json";
    std::string out_path;
    int threads = 0;
    double gamma = 0.05;
    std::optional<double> pi0;
    std::size_t M = 10000;
    std::size_t N = 2000;
    std::optional<std::uint64_t> seed;
    std::string sided = "two";
    std::string on = "ratio";
    bool share_streams = false;
    std::vector<std::string> cells;
    std::string config_path;
    bool table = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string text_num(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

std::string csv_num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

Format parse_format(const std::string& f) {
    if (f == "json") return Format::json;
    if (f == "csv") return Format::csv;
    if (f == "text") return Format::text;
    throw UsageError("unknown --format '" + f + "' (json, csv, text)");
}

void apply_threads(int requested) {
#ifdef _OPENMP
    int threads = requested;
    if (threads <= 0) {
        if (const char* env = std::getenv(kThreadsEnvVar)) {
            threads = std::atoi(env);
        }
    }
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
#else
    (void)requested;
#endif
}

std::uint64_t resolve_seed(const Options& o, std::ostream& err) {
    if (o.seed) {
        return *o.seed;
    }
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed: " << seed << "\n";
    return seed;
}

struct LoadedData {
    DataKind kind;
    std::string source;
    std::vector<LabelledSeries> series;
};

LoadedData load(const Options& o, bool raw_only) {
    if (o.data_path.empty() == o.records_path.empty()) {
        throw UsageError(raw_only ? "--data is required" : "exactly one of --data or --records is required");
    }
    if (raw_only && !o.records_path.empty()) {
        throw UsageError("extract reads raw sequences; use --data");
    }
    const DataKind kind = o.data_path.empty() ? DataKind::records : DataKind::raw_sequences;
    const std::string& path = o.data_path.empty() ? o.records_path : o.data_path;
    return {kind, path, to_record_series(load_populations(path, kind), kind)};
}

const std::vector<LabelledSeries>& require_pair(const LoadedData& d) {
    if (d.series.size() != 2) {
        throw DataError("this operation needs exactly two populations, found " + std::to_string(d.series.size()));
    }
    return d.series;
}

Json request_json(const std::string& op, const LoadedData& d) {
    Json req;
    req["operation"] = op;
    req["data_kind"] = d.kind == DataKind::raw_sequences ? "raw-sequences" : "records";
    req["source"] = d.source;
    req["data_digest"] = "fnv1a64:" + hex64(data_digest(d.series));
    return req;
}

Json records_json(const LoadedData& d) {
    Json arr = Json::array();
    for (const auto& s : d.series) {
        Json p;
        p["label"] = s.label;
        p["values"] = std::vector<double>(s.series.values().begin(), s.series.values().end());
        arr.push_back(p);
    }
    return arr;
}

Json envelope(const Json& request) {
    Json doc;
    doc["schema"] = "weibrec.report";
    doc["schema_version"] = kReportSchemaVersion;
    doc["tool"] = "weibrec";
    doc["version"] = kToolVersion;
    doc["request"] = request;
    return doc;
}

void emit(const Options& o, const std::string& body, std::ostream& out) {
    if (o.out_path.empty()) {
        out << body;
        return;
    }
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file) {
        throw DataError("cannot write '" + o.out_path + "'");
    }
    file << body;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

// Wide CSV with one column per population; readable back via --records.
std::string records_csv(const std::vector<LabelledSeries>& data) {
    std::ostringstream s;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        s << (i ? "," : "") << data[i].label;
        rows = std::max(rows, data[i].series.size());
    }
    s << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (i) s << ",";
            if (r < data[i].series.size()) s << csv_num(data[i].series[r]);
        }
        s << "\n";
    }
    return s.str();
}

int cmd_extract(const Options& o, std::ostream& out) {
    const Format fmt = parse_format(o.format);
    const LoadedData d = load(o, true);
    std::string body;
    if (fmt == Format::json) {
        Json doc = envelope(request_json("extract", d));
        doc["records"] = records_json(d);
        body = dump(doc);
    } else if (fmt == Format::csv) {
        body = records_csv(d.series);
    } else {
        std::ostringstream s;
        for (const auto& ls : d.series) {
            s << ls.label << " (n = " << ls.series.n() << "):";
            for (double v : ls.series.values()) s << " " << text_num(v);
            s << "\n";
        }
        body = s.str();
    }
    emit(o, body, out);
    return kExitOk;
}

int cmd_mle(const Options& o, std::ostream& out) {
    const Format fmt = parse_format(o.format);
    const LoadedData d = load(o, false);
    std::vector<WeibullFit> fits;
    for (const auto& ls : d.series) {
        try {
            fits.push_back(mle_records(ls.series));
        } catch (const DegenerateData& ex) {
            throw DataError("population '" + ls.label + "': " + ex.what());
        }
    }
    std::string body;
    if (fmt == Format::json) {
        Json doc = envelope(request_json("mle", d));
        doc["records"] = records_json(d);
        Json arr = Json::array();
        for (std::size_t i = 0; i < fits.size(); ++i) {
            Json f;
            f["label"] = d.series[i].label;
            f["n"] = d.series[i].series.n();
            f["alpha"] = fits[i].params.alpha;
            f["beta"] = fits[i].params.beta;
            f["se_alpha"] = fits[i].se_alpha;
            f["se_beta"] = fits[i].se_beta;
            f["loglik"] = fits[i].loglik;
            arr.push_back(f);
        }
        doc["result"] = {{"model", "separate"}, {"fits", arr}};
        body = dump(doc);
    } else if (fmt == Format::csv) {
        std::ostringstream s;
        s << "label,n,alpha,beta,se_alpha,se_beta,loglik\n";
        for (std::size_t i = 0; i < fits.size(); ++i) {
            s << d.series[i].label << "," << d.series[i].series.n() << "," << csv_num(fits[i].params.alpha) << ","
              << csv_num(fits[i].params.beta) << "," << csv_num(fits[i].se_alpha) << "," << csv_num(fits[i].se_beta)
              << "," << csv_num(fits[i].loglik) << "\n";
        }
        body = s.str();
    } else {
        std::ostringstream s;
        for (std::size_t i = 0; i < fits.size(); ++i) {
            s << d.series[i].label << ": alpha = " << text_num(fits[i].params.alpha) << " (s.e. "
              << text_num(fits[i].se_alpha) << "), beta = " << text_num(fits[i].params.beta) << " (s.e. "
              << text_num(fits[i].se_beta) << "), loglik = " << text_num(fits[i].loglik) << "\n";
        }
        body = s.str();
    }
    emit(o, body, out);
    return kExitOk;
}

int cmd_pooled(const Options& o, std::ostream& out) {
    const Format fmt = parse_format(o.format);
    const LoadedData d = load(o, false);
    const auto& pair = require_pair(d);
    PooledFit fit{};
    try {
        fit = pooled_mle(pair[0].series, pair[1].series);
    } catch (const DegenerateData& ex) {
        throw DataError(ex.what());
    }
    std::string body;
    if (fmt == Format::json) {
        Json doc = envelope(request_json("pooled-mle", d));
        doc["records"] = records_json(d);
        Json r;
        r["model"] = "pooled";
        r["beta"] = fit.beta;
        r["alpha1"] = fit.alpha1;
        r["alpha2"] = fit.alpha2;
        r["se_beta"] = fit.se_beta;
        r["se_alpha1"] = fit.se_alpha1;
        r["se_alpha2"] = fit.se_alpha2;
        r["loglik"] = fit.loglik;
        doc["result"] = r;
        body = dump(doc);
    } else if (fmt == Format::csv) {
        body = "beta,alpha1,alpha2,se_beta,se_alpha1,se_alpha2,loglik\n" + csv_num(fit.beta) + "," +
               csv_num(fit.alpha1) + "," + csv_num(fit.alpha2) + "," + csv_num(fit.se_beta) + "," +
               csv_num(fit.se_alpha1) + "," + csv_num(fit.se_alpha2) + "," + csv_num(fit.loglik) + "\n";
    } else {
        body = "pooled: beta = " + text_num(fit.beta) + " (s.e. " + text_num(fit.se_beta) + "), alpha1 = " +
               text_num(fit.alpha1) + " (s.e. " + text_num(fit.se_alpha1) + "), alpha2 = " + text_num(fit.alpha2) +
               " (s.e. " + text_num(fit.se_alpha2) + "), loglik = " + text_num(fit.loglik) + "\n";
    }
    emit(o, body, out);
    return kExitOk;
}

PivotalKind kind_for(const std::string& on) {
    if (on == "ratio") return PivotalKind::ratio;
    if (on == "difference") return PivotalKind::difference;
    throw UsageError("unknown --on '" + on + "' (ratio, difference)");
}

int cmd_interval(const Options& o, PivotalKind kind, std::ostream& out, std::ostream& err) {
    const Format fmt = parse_format(o.format);
    const LoadedData d = load(o, false);
    const auto& pair = require_pair(d);
    (void)percentile_ranks(o.M, o.gamma);
    const std::uint64_t seed = resolve_seed(o, err);
    const PivotalDraws draws =
        sample_pivotal(pair[0].series, pair[1].series, kind, o.M, seed, {.share_streams = o.share_streams});
    const IntervalEstimate ci = gci_percentile(draws, o.gamma);
    const double b1 = mle_records(pair[0].series).params.beta;
    const double b2 = mle_records(pair[1].series).params.beta;
    const double point = kind == PivotalKind::ratio ? b1 / b2 : b1 - b2;
    const std::string estimand = kind == PivotalKind::ratio ? "pi" : "delta";
    const std::string op = kind == PivotalKind::ratio ? "ci-ratio" : "ci-diff";

    std::string body;
    if (fmt == Format::json) {
        Json req = request_json(op, d);
        req["gamma"] = o.gamma;
        req["M"] = o.M;
        req["seed"] = seed;
        req["share_streams"] = o.share_streams;
        Json doc = envelope(req);
        doc["records"] = records_json(d);
        Json r;
        r["estimand"] = estimand;
        r["point_estimate"] = point;
        r["lower"] = ci.lower;
        r["upper"] = ci.upper;
        r["level"] = ci.level;
        r["M"] = ci.M;
        doc["result"] = r;
        body = dump(doc);
    } else if (fmt == Format::csv) {
        body = "estimand,point_estimate,lower,upper,level,M,seed\n" + estimand + "," + csv_num(point) + "," +
               csv_num(ci.lower) + "," + csv_num(ci.upper) + "," + csv_num(ci.level) + "," + std::to_string(ci.M) +
               "," + std::to_string(seed) + "\n";
    } else {
        body = text_num(100.0 * ci.level) + "% generalized CI for " + estimand + ": (" + text_num(ci.lower) + ", " +
               text_num(ci.upper) + "), point estimate " + text_num(point) + ", M = " + std::to_string(ci.M) +
               ", seed = " + std::to_string(seed) + "\n";
    }
    emit(o, body, out);
    return kExitOk;
}

int cmd_test(const Options& o, std::ostream& out, std::ostream& err) {
    const Format fmt = parse_format(o.format);
    if (!o.pi0) {
        throw UsageError("test requires --pi0");
    }
    if (o.sided != "two" && o.sided != "greater") {
        throw UsageError("unknown --sided '" + o.sided + "' (two, greater)");
    }
    if (!(o.gamma > 0.0 && o.gamma < 1.0)) {
        throw UsageError("--gamma must lie in (0, 1)");
    }
    const PivotalKind kind = kind_for(o.on);
    const LoadedData d = load(o, false);
    const auto& pair = require_pair(d);
    if (o.M < 1) {
        throw UsageError("--M must be at least 1");
    }
    const std::uint64_t seed = resolve_seed(o, err);
    const PivotalDraws draws =
        sample_pivotal(pair[0].series, pair[1].series, kind, o.M, seed, {.share_streams = o.share_streams});
    const TestResult t = o.sided == "two" ? gpv_two_sided(draws, *o.pi0) : gpv_one_sided(draws, *o.pi0);
    const bool reject = t.p_value < o.gamma;
    const std::string conclusion = std::string(reject ? "reject" : "fail to reject") + " at " + text_num(o.gamma);
    const std::string sided = o.sided == "two" ? "two-sided" : "one-sided-greater";

    std::string body;
    if (fmt == Format::json) {
        Json req = request_json("test", d);
        req["on"] = o.on;
        req["pi0"] = *o.pi0;
        req["sidedness"] = sided;
        req["level"] = o.gamma;
        req["M"] = o.M;
        req["seed"] = seed;
        req["share_streams"] = o.share_streams;
        Json doc = envelope(req);
        doc["records"] = records_json(d);
        Json r;
        r["p_value"] = t.p_value;
        r["pi0"] = t.pi0;
        r["sidedness"] = sided;
        r["M"] = t.M;
        r["reject"] = reject;
        r["conclusion"] = conclusion;
        doc["result"] = r;
        body = dump(doc);
    } else if (fmt == Format::csv) {
        body = "on,pi0,sidedness,p_value,level,reject,M,seed\n" + o.on + "," + csv_num(t.pi0) + "," + sided + "," +
               csv_num(t.p_value) + "," + csv_num(o.gamma) + "," + (reject ? "true" : "false") + "," +
               std::to_string(t.M) + "," + std::to_string(seed) + "\n";
    } else {
        body = sided + " generalized p-value for " + o.on + " = " + text_num(t.pi0) + ": " + text_num(t.p_value) +
               " (" + conclusion + "), M = " + std::to_string(t.M) + ", seed = " + std::to_string(seed) + "\n";
    }
    emit(o, body, out);
    return kExitOk;
}

SimConfig parse_cell(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) {
        parts.push_back(item);
    }
    if (parts.size() != 4) {
        throw UsageError("--cell expects n1,n2,beta1,beta2 (got '" + spec + "')");
    }
    SimConfig c;
    try {
        c.n1 = std::stoul(parts[0]);
        c.n2 = std::stoul(parts[1]);
        c.beta1 = std::stod(parts[2]);
        c.beta2 = std::stod(parts[3]);
    } catch (const std::exception&) {
        throw UsageError("--cell expects n1,n2,beta1,beta2 (got '" + spec + "')");
    }
    return c;
}

std::vector<SimConfig> build_grid(const Options& o, std::uint64_t seed, std::string& grid_name) {
    std::vector<SimConfig> grid;
    std::size_t M = o.M;
    std::size_t N = o.N;
    double gamma = o.gamma;
    std::uint64_t master = seed;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) {
            throw DataError("cannot open '" + o.config_path + "'");
        }
        Json cfg;
        try {
            cfg = Json::parse(in);
        } catch (const Json::exception& ex) {
            throw DataError(std::string("invalid simulation config: ") + ex.what());
        }
        try {
            M = cfg.value("M", M);
            N = cfg.value("N", N);
            gamma = cfg.value("gamma", gamma);
            if (!cfg.contains("cells")) {
                grid = table_grid(M, N, gamma, master);
                grid_name = "table";
                return grid;
            }
            std::uint64_t k = 0;
            for (const auto& cell : cfg.at("cells")) {
                SimConfig c;
                c.n1 = cell.at("n1").get<std::size_t>();
                c.n2 = cell.at("n2").get<std::size_t>();
                c.beta1 = cell.at("beta1").get<double>();
                c.beta2 = cell.value("beta2", 2.0);
                c.alpha1 = cell.value("alpha1", 1.0);
                c.alpha2 = cell.value("alpha2", 1.0);
                c.M = M;
                c.N = N;
                c.gamma = gamma;
                c.seed = cell.contains("seed") ? cell.at("seed").get<std::uint64_t>() : derive_seed(master, k);
                ++k;
                grid.push_back(c);
            }
        } catch (const Json::exception& ex) {
            throw DataError(std::string("invalid simulation config: ") + ex.what());
        }
        grid_name = "config";
    } else if (!o.cells.empty()) {
        std::uint64_t k = 0;
        for (const auto& spec : o.cells) {
            SimConfig c = parse_cell(spec);
            c.M = M;
            c.N = N;
            c.gamma = gamma;
            c.seed = derive_seed(master, k++);
            grid.push_back(c);
        }
        grid_name = "cells";
    } else {
        grid = table_grid(M, N, gamma, master);
        grid_name = "table";
    }
    for (const auto& c : grid) {
        validate(c);
    }
    return grid;
}

Json cell_json(const CellResult& cell) {
    Json j;
    const auto& c = cell.config;
    j["n1"] = c.n1;
    j["n2"] = c.n2;
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["alpha1"] = c.alpha1;
    j["alpha2"] = c.alpha2;
    j["M"] = c.M;
    j["N"] = c.N;
    j["gamma"] = c.gamma;
    j["seed"] = c.seed;
    if (cell.report) {
        j["coverage"] = cell.report->coverage;
        j["expected_length"] = cell.report->expected_length;
        j["mc_se_coverage"] = cell.report->mc_se_coverage;
        j["mc_se_length"] = cell.report->mc_se_length;
    } else {
        j["error"] = cell.error;
    }
    return j;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const Format fmt = parse_format(o.format);
    if (!o.config_path.empty() && !o.cells.empty()) {
        throw UsageError("--config and --cell are mutually exclusive");
    }
    const std::uint64_t seed = resolve_seed(o, err);
    std::string grid_name;
    const auto grid = build_grid(o, seed, grid_name);
    const auto results = run_grid(grid);

    std::string body;
    if (fmt == Format::json) {
        Json req;
        req["operation"] = "simulate";
        req["grid"] = grid_name;
        req["seed"] = seed;
        if (!o.config_path.empty()) {
            req["config"] = o.config_path;
        }
        Json doc = envelope(req);
        Json cells = Json::array();
        for (const auto& r : results) {
            cells.push_back(cell_json(r));
        }
        doc["cells"] = cells;
        body = dump(doc);
    } else if (fmt == Format::csv) {
        std::ostringstream s;
        s << "n1,n2,beta1,beta2,alpha1,alpha2,M,N,gamma,seed,coverage,expected_length,mc_se_coverage,mc_se_length,"
             "error\n";
        for (const auto& r : results) {
            const auto& c = r.config;
            s << c.n1 << "," << c.n2 << "," << csv_num(c.beta1) << "," << csv_num(c.beta2) << ","
              << csv_num(c.alpha1) << "," << csv_num(c.alpha2) << "," << c.M << "," << c.N << "," << csv_num(c.gamma)
              << "," << c.seed << ",";
            if (r.report) {
                s << csv_num(r.report->coverage) << "," << csv_num(r.report->expected_length) << ","
                  << csv_num(r.report->mc_se_coverage) << "," << csv_num(r.report->mc_se_length) << ",";
            } else {
                std::string e = r.error;
                std::replace(e.begin(), e.end(), ',', ';');
                s << ",,,," << e;
            }
            s << "\n";
        }
        body = s.str();
    } else {
        std::ostringstream s;
        for (const auto& r : results) {
            const auto& c = r.config;
            s << "n1=" << c.n1 << " n2=" << c.n2 << " beta1=" << text_num(c.beta1) << " beta2=" << text_num(c.beta2);
            if (r.report) {
                s << " coverage=" << text_num(r.report->coverage) << " (se " << text_num(r.report->mc_se_coverage)
                  << ") length=" << text_num(r.report->expected_length) << "\n";
            } else {
                s << " error: " << r.error << "\n";
            }
        }
        body = s.str();
    }
    emit(o, body, out);
    if (o.table) {
        out << render_table(results);
    }
    const bool any_failed = std::any_of(results.begin(), results.end(), [](const CellResult& r) { return !r.report; });
    for (const auto& r : results) {
        if (!r.report) {
            err << "cell n1=" << r.config.n1 << " n2=" << r.config.n2 << " beta1=" << r.config.beta1
                << " failed: " << r.error << "\n";
        }
    }
    return any_failed ? kExitNumerical : kExitOk;
}

void add_io_options(CLI::App* sub, Options& o, bool records_allowed) {
    sub->add_option("--data", o.data_path, "raw observation sequences (CSV or .json)");
    if (records_allowed) {
        sub->add_option("--records", o.records_path, "pre-extracted record values (CSV or .json)");
    }
    sub->add_option("--format", o.format, "json, csv or text")->capture_default_str();
    sub->add_option("--out", o.out_path, "write the report here instead of stdout");
    sub->add_option("--threads", o.threads, "worker threads (default: $WEIBREC_THREADS or all cores)");
}

void add_mc_options(CLI::App* sub, Options& o) {
    sub->add_option("--M", o.M, "Monte Carlo draws")->capture_default_str();
    sub->add_option("--seed", o.seed, "master seed (random and printed if absent)");
    sub->add_flag("--share-streams", o.share_streams, "reuse population 1's exponential records for population 2");
}

}  // namespace

std::string render_table(const std::vector<CellResult>& cells) {
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    std::vector<double> cols;
    for (const auto& c : cells) {
        const std::pair<std::size_t, std::size_t> row{c.config.n1, c.config.n2};
        if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
        if (std::find(cols.begin(), cols.end(), c.config.beta1) == cols.end()) cols.push_back(c.config.beta1);
    }
    auto lookup = [&](const std::pair<std::size_t, std::size_t>& row, double b1) -> const CellResult* {
        for (const auto& c : cells) {
            if (c.config.n1 == row.first && c.config.n2 == row.second && c.config.beta1 == b1) return &c;
        }
        return nullptr;
    };

    std::ostringstream s;
    auto block = [&](const char* title, bool coverage) {
        s << title << "\n" << std::setw(8) << "n1,n2";
        for (double b : cols) s << std::setw(9) << text_num(b);
        s << "\n";
        for (const auto& row : rows) {
            s << std::setw(8) << (std::to_string(row.first) + "," + std::to_string(row.second));
            for (double b : cols) {
                const CellResult* c = lookup(row, b);
                if (c == nullptr) {
                    s << std::setw(9) << "";
                } else if (!c->report) {
                    s << std::setw(9) << "err";
                } else {
                    const double v = coverage ? c->report->coverage : c->report->expected_length;
                    s << std::setw(9) << std::fixed << std::setprecision(3) << v << std::defaultfloat;
                }
            }
            s << "\n";
        }
    };
    block("Empirical coverage (columns: beta1)", true);
    s << "\n";
    block("Expected length (columns: beta1)", false);
    return s.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized inference on the shape parameters of two Weibull populations from upper records",
                 "weibrec"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    Options o;

    auto* extract = app.add_subcommand("extract", "extract upper records from raw sequences");
    add_io_options(extract, o, false);

    auto* mle = app.add_subcommand("mle", "per-population maximum likelihood estimates");
    add_io_options(mle, o, true);

    auto* pooled = app.add_subcommand("pooled-mle", "maximum likelihood estimates under a common shape");
    add_io_options(pooled, o, true);

    auto* ci_ratio = app.add_subcommand("ci-ratio", "generalized confidence interval for beta1 / beta2");
    add_io_options(ci_ratio, o, true);
    add_mc_options(ci_ratio, o);
    ci_ratio->add_option("--gamma", o.gamma, "miscoverage; the level is 1 - gamma")->capture_default_str();

    auto* ci_diff = app.add_subcommand("ci-diff", "generalized confidence interval for beta1 - beta2");
    add_io_options(ci_diff, o, true);
    add_mc_options(ci_diff, o);
    ci_diff->add_option("--gamma", o.gamma, "miscoverage; the level is 1 - gamma")->capture_default_str();

    auto* test = app.add_subcommand("test", "generalized p-value for H0: pi = pi0 (or pi <= pi0)");
    add_io_options(test, o, true);
    add_mc_options(test, o);
    test->add_option("--pi0", o.pi0, "hypothesized ratio (or difference with --on difference)");
    test->add_option("--gamma", o.gamma, "significance level for the conclusion")->capture_default_str();
    test->add_option("--sided", o.sided, "two or greater")->capture_default_str();
    test->add_option("--on", o.on, "ratio or difference")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "coverage study of the ratio interval");
    simulate->add_option("--M", o.M, "pivotal draws per interval");
    simulate->add_option("--N", o.N, "outer replications per cell")->capture_default_str();
    simulate->add_option("--gamma", o.gamma, "miscoverage")->capture_default_str();
    simulate->add_option("--seed", o.seed, "master seed (random and printed if absent)");
    simulate->add_option("--cell", o.cells, "n1,n2,beta1,beta2 (repeatable); default is the full table grid");
    simulate->add_option("--config", o.config_path, "JSON grid specification");
    simulate->add_flag("--table", o.table, "print the coverage/length table to stdout");
    simulate->add_option("--format", o.format, "json, csv or text")->capture_default_str();
    simulate->add_option("--out", o.out_path, "write the report here instead of stdout");
    simulate->add_option("--threads", o.threads, "worker threads");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitUsage;
    }

    if (simulate->parsed() && simulate->count("--M") == 0) {
        o.M = 2000;
    }
    apply_threads(o.threads);

    try {
        if (extract->parsed()) return cmd_extract(o, out);
        if (mle->parsed()) return cmd_mle(o, out);
        if (pooled->parsed()) return cmd_pooled(o, out);
        if (ci_ratio->parsed()) return cmd_interval(o, PivotalKind::ratio, out, err);
        if (ci_diff->parsed()) return cmd_interval(o, PivotalKind::difference, out, err);
        if (test->parsed()) return cmd_test(o, out, err);
        if (simulate->parsed()) return cmd_simulate(o, out, err);
    } catch (const UsageError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const InsufficientDraws& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const InvalidInput& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitData;
    } catch (const NumericalError& ex) {
        err << "numerical failure: " << ex.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace weibrec
