#include "cli.hpp"

#include "fpgp/error.hpp"
#include "fpgp/experiment.hpp"
#include "fpgp/fixtures.hpp"
#include "fpgp/image.hpp"
#include "fpgp/match.hpp"
#include "fpgp/minutiae.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fpgp::cli {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return hex.str();
}

namespace {

// Thrown for bad user input; mapped to kInputError.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fixed2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string sig9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("failed writing " + path.string());
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw InputError("cannot create directory " + dir.string());
}

MinutiaeSet read_minutiae(const std::vector<std::string>& paths) {
    MinutiaeSet merged;
    for (const auto& p : paths) {
        if (!fs::exists(p)) throw InputError("no such file: " + p);
        auto part = load_minutiae_csv(p);
        merged.endings.insert(merged.endings.end(), part.endings.begin(), part.endings.end());
        merged.bifurcations.insert(merged.bifurcations.end(), part.bifurcations.begin(), part.bifurcations.end());
    }
    merged.canonicalize();
    return merged;
}

std::string decision_line(const KindReport& k) {
    if (!k.covered) return "not covered";
    return k.mse ? fixed2(*k.mse) : std::string("COUNT_MISMATCH");
}

void print_kind(std::ostream& out, std::string_view title, const std::vector<double>& predictions,
                const std::vector<double>& reference, const KindReport& k) {
    if (!k.covered && predictions.empty()) return;
    out << title << " (query " << k.query_count << ", candidate " << k.candidate_count << ")\n";
    out << std::setw(4) << "#" << std::setw(14) << "prediction" << std::setw(12) << "target" << "\n";
    const auto rows = std::max(predictions.size(), reference.size());
    for (std::size_t i = 0; i < rows; ++i) {
        out << std::setw(4) << i + 1 << std::setw(14) << (i < predictions.size() ? fixed2(predictions[i]) : "")
            << std::setw(12) << (i < reference.size() ? fixed2(reference[i]) : "") << "\n";
    }
}

void print_report(std::ostream& out, const MatchReport& r) {
    print_kind(out, "endings", r.predictions.end, r.end_reference, r.end);
    print_kind(out, "bifurcations", r.predictions.bif, r.bif_reference, r.bif);
    out << "end mse: " << decision_line(r.end) << "\n";
    out << "bif mse: " << decision_line(r.bif) << "\n";
    out << "decision: " << to_string(r.decision) << "\n";
}

void print_template(std::ostream& out, const Template& t) {
    const TerminalSet constants({});
    if (t.end_formula) {
        out << "end formula: " << serialize_prefix(*t.end_formula, ending_terminals(constants, t.uses_target_variable))
            << "\n";
        out << "end training rmse: " << fixed2(t.end_training_rmse) << "\n";
    }
    if (t.bif_formula) {
        out << "bif formula: "
            << serialize_prefix(*t.bif_formula, bifurcation_terminals(constants, t.uses_target_variable)) << "\n";
        out << "bif training rmse: " << fixed2(t.bif_training_rmse) << "\n";
    }
}

EvolutionConfig evolution_config(const std::string& config_path, std::optional<std::uint64_t> seed) {
    EvolutionConfig c = reproduction_config(1);
    if (!config_path.empty()) {
        if (!fs::exists(config_path)) throw InputError("no such config file: " + config_path);
        c = load_config(config_path, c);
    }
    if (seed) c.rng_seed = *seed;
    return c;
}

MatchConfig match_config(double threshold, const std::string& policy, const std::string& mode) {
    MatchConfig m;
    if (!(threshold >= 0.0)) throw InputError("--threshold must be non-negative");
    m.mse_threshold = threshold;
    const auto p = parse_count_policy(policy);
    if (!p) throw InputError("unknown --count-policy '" + policy + "' (strict, pair-prefix)");
    m.count_policy = *p;
    const auto c = parse_comparison_mode(mode);
    if (!c) throw InputError("unknown --mode '" + mode + "' (query-targets, own-y)");
    m.comparison_mode = *c;
    return m;
}

// --- subcommands -----------------------------------------------------------

struct ExtractArgs {
    std::string image;
    int margin = kDefaultBorderMargin;
    bool thin = false;
    std::string out;
};

int cmd_extract(const ExtractArgs& a, std::ostream& out) {
    if (!fs::exists(a.image)) throw InputError("no such image: " + a.image);
    BinaryImage img;
    try {
        img = load_image(a.image);
    } catch (const FormatError& e) {
        throw InputError(a.image + ": " + e.what());
    }
    const SkeletonImage skeleton = a.thin ? thin(img) : SkeletonImage(std::move(img));
    MinutiaeSet set;
    try {
        set = extract_minutiae(skeleton, a.margin);
    } catch (const std::invalid_argument& e) {
        throw InputError(a.image + ": " + e.what());
    }
    const std::string stem = a.out.empty() ? fs::path(a.image).replace_extension().string() : a.out;
    write_text(stem + ".end.csv", format_minutiae_csv(set, MinutiaKind::Ending, true));
    write_text(stem + ".bif.csv", format_minutiae_csv(set, MinutiaKind::Bifurcation, true));
    out << "endings: " << set.endings.size() << ", bifurcations: " << set.bifurcations.size() << "\n";
    return kSuccess;
}

struct TrainArgs {
    std::vector<std::string> csvs;
    std::string bif_targets;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "query.tmpl";
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    MinutiaeSet query = read_minutiae(a.csvs);
    if (!a.bif_targets.empty()) {
        if (!fs::exists(a.bif_targets)) throw InputError("no such file: " + a.bif_targets);
        const auto targets = load_targets_csv(a.bif_targets);
        if (targets.size() != query.bifurcations.size()) {
            throw InputError("--bif-targets holds " + std::to_string(targets.size()) + " values for " +
                             std::to_string(query.bifurcations.size()) + " bifurcations");
        }
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (targets[i] != static_cast<int>(targets[i])) throw InputError("--bif-targets values must be whole pixels");
            query.bifurcations[i].y = static_cast<int>(targets[i]);
        }
        query.canonicalize();
    }
    if (query.empty()) throw InputError("no minutiae in the supplied CSV files");
    const auto lacks_y = [](const auto& list) {
        return std::any_of(list.begin(), list.end(), [](const auto& m) { return !m.y; });
    };
    if (lacks_y(query.endings) || lacks_y(query.bifurcations)) {
        throw InputError("training needs a y value for every query minutia (add a y column or --bif-targets)");
    }
    const auto config = evolution_config(a.config, a.seed);
    const auto tmpl = build_template(query, config);
    save_template(tmpl, a.out);
    print_template(out, tmpl);
    out << "template: " << a.out << "\n";
    return kSuccess;
}

struct MatchArgs {
    std::string template_path;
    std::vector<std::string> csvs;
    double threshold = 25.0;
    std::string policy = "strict";
    std::string mode = "query-targets";
};

int cmd_match(const MatchArgs& a, std::ostream& out) {
    const auto config = match_config(a.threshold, a.policy, a.mode);
    if (!fs::exists(a.template_path)) throw InputError("no such template: " + a.template_path);
    const auto tmpl = load_template(a.template_path);
    const auto candidate = read_minutiae(a.csvs);
    const auto report = decide(tmpl, candidate, config);
    print_report(out, report);
    return report.decision == Decision::Match ? kSuccess : kNonMatch;
}

std::vector<std::string> write_fixtures(const fs::path& dir) {
    ensure_directory(dir);
    std::vector<std::string> manifest;
    for (const auto& f : fixtures::files()) {
        write_text(dir / f.name, f.content);
        manifest.push_back(sha256_hex(f.content) + "  " + f.name);
    }
    return manifest;
}

int cmd_fixtures(const std::string& dir, std::ostream& out) {
    for (const auto& line : write_fixtures(dir)) out << line << "\n";
    return kSuccess;
}

struct ReproduceArgs {
    std::optional<std::uint64_t> seed;
    std::string dir = "reproduction";
    std::string config;
    double threshold = 25.0;
    std::string policy = "strict";
};

std::string prediction_table(const Reproduction& r, bool endings) {
    const auto column = [&](std::size_t image) -> const std::vector<double>& {
        return endings ? r.images[image].predictions.end : r.images[image].predictions.bif;
    };
    const auto& query = endings ? r.tmpl.end_targets : r.tmpl.bif_targets;
    std::size_t rows = query.size();
    for (std::size_t i = 0; i < r.images.size(); ++i) rows = std::max(rows, column(i).size());

    std::string csv = "row,image1,image2,image3,query\n";
    for (std::size_t row = 0; row < rows; ++row) {
        csv += std::to_string(row + 1);
        for (std::size_t i = 0; i < r.images.size(); ++i) {
            csv += ",";
            if (row < column(i).size()) csv += sig9(column(i)[row]);
        }
        csv += ",";
        if (row < query.size()) csv += sig9(query[row]);
        csv += "\n";
    }
    return csv;
}

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out) {
    const fs::path dir = a.dir;
    write_fixtures(dir);
    write_text(dir / "query_bif.csv", format_minutiae_csv(fixtures::query_minutiae(), MinutiaKind::Bifurcation));

    const auto evo = evolution_config(a.config, a.seed);
    const auto match = match_config(a.threshold, a.policy, "query-targets");
    const auto r = reproduce(evo, match);
    save_template(r.tmpl, dir / "query.tmpl");
    print_template(out, r.tmpl);

    const auto mse_cell = [](const KindReport& k) { return k.mse ? sig9(*k.mse) : std::string("COUNT_MISMATCH"); };
    std::string summary = "image,end_query,end_candidate,end_mse,bif_query,bif_candidate,bif_mse,decision\n";
    out << "\n"
        << std::left << std::setw(8) << "image" << std::setw(10) << "end q/c" << std::setw(16) << "end mse"
        << std::setw(10) << "bif q/c" << std::setw(16) << "bif mse" << "decision\n";
    for (std::size_t i = 0; i < r.images.size(); ++i) {
        const auto& rep = r.images[i];
        const std::string name = "image" + std::to_string(i + 1);
        out << std::setw(8) << name << std::setw(10)
            << (std::to_string(rep.end.query_count) + "/" + std::to_string(rep.end.candidate_count)) << std::setw(16)
            << decision_line(rep.end) << std::setw(10)
            << (std::to_string(rep.bif.query_count) + "/" + std::to_string(rep.bif.candidate_count)) << std::setw(16)
            << decision_line(rep.bif) << to_string(rep.decision) << "\n";
        summary += name + "," + std::to_string(rep.end.query_count) + "," + std::to_string(rep.end.candidate_count) +
                   "," + mse_cell(rep.end) + "," + std::to_string(rep.bif.query_count) + "," +
                   std::to_string(rep.bif.candidate_count) + "," + mse_cell(rep.bif) + "," +
                   std::string(to_string(rep.decision)) + "\n";
    }
    out << std::right;
    write_text(dir / "summary.csv", summary);
    write_text(dir / "end_predictions.csv", prediction_table(r, true));
    write_text(dir / "bif_predictions.csv", prediction_table(r, false));
    out << "outputs: " << dir.string() << "\n";

    if (!training_usable(r.tmpl, match.mse_threshold)) {
        out << "training failure: end rmse " << sig9(r.tmpl.end_training_rmse) << ", bif rmse "
            << sig9(r.tmpl.bif_training_rmse) << " (threshold mse " << sig9(match.mse_threshold) << ")\n";
        return kTrainingFailure;
    }
    const bool ok = matches_published_verdicts(r);
    out << "verdicts: " << (ok ? "reproduced" : "NOT reproduced") << "\n";
    return ok ? kSuccess : kNonMatch;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fingerprint matching with genetic-programming minutiae formulas", "fpgp"};
    app.require_subcommand(1);

    ExtractArgs extract;
    auto* sc_extract = app.add_subcommand("extract", "Extract minutiae from a PBM/PGM skeleton image");
    sc_extract->add_option("image", extract.image, "PBM or PGM image")->required();
    sc_extract->add_option("--margin", extract.margin, "Ignore pixels closer than this to the border")
        ->capture_default_str();
    sc_extract->add_flag("--thin", extract.thin, "Run Zhang-Suen thinning first");
    sc_extract->add_option("--out", extract.out, "Output stem; writes <out>.end.csv and <out>.bif.csv");

    TrainArgs train;
    std::uint64_t train_seed = 1;
    auto* sc_train = app.add_subcommand("train", "Evolve a template from query minutiae CSVs");
    sc_train->add_option("csv", train.csvs, "Ending and/or bifurcation CSV files")->required();
    sc_train->add_option("--bif-targets", train.bif_targets, "y values for a bifurcation CSV without a y column");
    sc_train->add_option("--config", train.config, "key=value evolution config");
    auto* train_seed_opt = sc_train->add_option("--seed", train_seed, "Random seed (default 1)");
    sc_train->add_option("--out", train.out, "Template path")->capture_default_str();

    MatchArgs match;
    auto* sc_match = app.add_subcommand("match", "Match candidate minutiae against a template");
    sc_match->add_option("template", match.template_path, "Template file")->required();
    sc_match->add_option("csv", match.csvs, "Candidate ending and/or bifurcation CSV files")->required();
    sc_match->add_option("--threshold", match.threshold, "MSE threshold in pixels^2")->capture_default_str();
    sc_match->add_option("--count-policy", match.policy, "strict or pair-prefix")->capture_default_str();
    sc_match->add_option("--mode", match.mode, "query-targets or own-y")->capture_default_str();

    std::string fixtures_dir = "fixtures";
    auto* sc_fixtures = app.add_subcommand("fixtures", "Write the published minutiae tables as CSV files");
    sc_fixtures->add_option("--dir", fixtures_dir, "Output directory")->capture_default_str();

    ReproduceArgs repro;
    auto* sc_reproduce = app.add_subcommand("reproduce", "Enrol the query fixture and match images 1-3");
    std::uint64_t repro_seed = 1;
    auto* repro_seed_opt = sc_reproduce->add_option("--seed", repro_seed, "Random seed (default 1)");
    sc_reproduce->add_option("--dir", repro.dir, "Output directory")->capture_default_str();
    sc_reproduce->add_option("--config", repro.config, "key=value evolution config");
    sc_reproduce->add_option("--threshold", repro.threshold, "MSE threshold in pixels^2")->capture_default_str();
    sc_reproduce->add_option("--count-policy", repro.policy, "strict or pair-prefix")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (sc_extract->parsed()) return cmd_extract(extract, out);
        if (sc_train->parsed()) {
            if (train_seed_opt->count() > 0) train.seed = train_seed;
            return cmd_train(train, out);
        }
        if (sc_match->parsed()) return cmd_match(match, out);
        if (sc_fixtures->parsed()) return cmd_fixtures(fixtures_dir, out);
        if (sc_reproduce->parsed()) {
            if (repro_seed_opt->count() > 0) repro.seed = repro_seed;
            return cmd_reproduce(repro, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

} // namespace fpgp::cli
