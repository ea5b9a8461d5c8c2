#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "convbound/bound_zoo.hpp"
#include "convbound/bundle.hpp"
#include "convbound/complexity.hpp"
#include "convbound/csv.hpp"
#include "convbound/linalg.hpp"
#include "convbound/verify.hpp"

namespace {

using namespace convbound;

// All reports go to stdout unless --out is given.
void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw IoError("cannot write " + out_path);
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + out_path);
    }
}

NormMode parse_mode(const std::string& mode) {
    if (mode == "exact") {
        return NormMode::exact;
    }
    if (mode == "bounded") {
        return NormMode::bounded;
    }
    throw DomainError("mode must be 'exact' or 'bounded'");
}

ComplexityInputs complexity_inputs(const NetBundle& bundle, NormMode mode) {
    ComplexityInputs inputs;
    for (std::size_t i = 0; i < bundle.spec.layers.size(); ++i) {
        const LayerSpec& layer = bundle.spec.layers[i];
        const LayerNorms norms = layer_norms(layer, bundle.weights[i], mode);
        ComplexityLayer cl;
        cl.rho = layer.lipschitz;
        cl.s = norms.s;
        cl.a = norms.a;
        switch (layer.kind) {
            case LayerKind::fully_connected:
                cl.is_conv = false;
                cl.d_in = layer.d_in;
                cl.d_out = layer.d_out;
                break;
            case LayerKind::standard_conv:
                cl.is_conv = true;
                cl.c = layer.c_out;
                cl.r = layer.spatial_k;
                cl.d = layer.d_out;
                break;
            case LayerKind::depthwise_conv:
                cl.is_conv = true;
                cl.c = layer.c_in;
                cl.r = layer.spatial_k;
                cl.d = layer.d_out;
                break;
            case LayerKind::pointwise_conv:
                cl.is_conv = true;
                cl.c = layer.c_out;
                cl.r = layer.c_in;
                cl.d = layer.d_out;
                break;
        }
        inputs.layers.push_back(cl);
    }
    return inputs;
}

int cmd_lower(const std::string& bundle_path, std::size_t layer, const std::string& out) {
    const NetBundle bundle = load_bundle(bundle_path);
    if (layer < 1 || layer > bundle.spec.layers.size()) {
        throw DomainError("layer index " + std::to_string(layer) + " outside [1, " +
                          std::to_string(bundle.spec.layers.size()) + "]");
    }
    const DenseMatrix eff =
        effective_matrix(bundle.spec.layers[layer - 1], bundle.weights[layer - 1]);
    std::ostringstream text;
    write_csv_matrix(text, eff);
    emit(text.str(), out);
    return 0;
}

int cmd_norms(const std::string& bundle_path, const std::string& mode_name,
              const std::string& out) {
    const NetBundle bundle = load_bundle(bundle_path);
    const NormMode mode = parse_mode(mode_name);
    std::ostringstream text;
    write_csv_row(text, {"layer", "kind", "mode", "a", "s", "n21"});
    for (std::size_t i = 0; i < bundle.spec.layers.size(); ++i) {
        const LayerSpec& layer = bundle.spec.layers[i];
        const LayerNorms norms = layer_norms(layer, bundle.weights[i], mode);
        write_csv_row(text, {std::to_string(i + 1), layer_kind_name(layer.kind), mode_name,
                             format_full(norms.a), format_full(norms.s),
                             format_full(norms.n21)});
    }
    emit(text.str(), out);
    return 0;
}

int cmd_verify(const std::string& bundle_path, std::size_t trials, std::uint64_t seed) {
    const NetBundle bundle = load_bundle(bundle_path);
    const auto results = run_verification(bundle, trials, seed);
    for (const auto& r : results) {
        if (r.passed) {
            std::cout << "PASS " << r.name << " (" << r.trials << " trials)\n";
        } else {
            std::cout << "FAIL " << r.name << " (" << r.trials << " trials): " << r.detail
                      << "\n";
        }
    }
    return all_passed(results) ? 0 : 3;
}

int cmd_complexity(const std::string& bundle_path, double eta, const std::string& mode_name,
                   const std::string& out) {
    const NetBundle bundle = load_bundle(bundle_path);
    if (!(eta > 0.0)) {
        throw DomainError("eta must be positive");
    }
    const NormMode mode = parse_mode(mode_name);
    const ComplexityInputs inputs = complexity_inputs(bundle, mode);
    std::ostringstream text;
    write_csv_row(text, {"metric", "value"});
    write_csv_row(text, {"mode", mode_name});
    write_csv_row(text, {"eta", format_full(eta)});
    write_csv_row(text, {"sensitive_complexity", format_full(sensitive_complexity(inputs))});
    write_csv_row(text, {"sensitive_complexity_log10",
                         format_full(sensitive_complexity_log10(inputs))});
    emit(text.str(), out);
    return 0;
}

int cmd_bound(const std::string& bundle_path, double eta, double delta, std::size_t n,
              double x_fnorm, const std::string& risk_file, const std::string& mode_name,
              const std::string& out) {
    const NetBundle bundle = load_bundle(bundle_path);
    const NormMode mode = parse_mode(mode_name);
    double risk = 0.0;
    if (!risk_file.empty()) {
        std::ifstream in(risk_file);
        if (!in) {
            throw IoError("cannot open " + risk_file);
        }
        if (!(in >> risk)) {
            throw ParseError(risk_file + ": expected a single real number");
        }
    }
    const BoundParams params{eta, delta, n, x_fnorm};
    const double complexity = sensitive_complexity(complexity_inputs(bundle, mode));
    const double value = generalization_bound(risk, params, complexity);
    std::ostringstream text;
    write_csv_row(text, {"metric", "value"});
    write_csv_row(text, {"mode", mode_name});
    write_csv_row(text, {"empirical_risk", format_full(risk)});
    write_csv_row(text, {"sensitive_complexity", format_full(complexity)});
    write_csv_row(text, {"rademacher_term", format_full(rademacher_bound(params, complexity))});
    write_csv_row(text, {"generalization_bound", format_full(value)});
    emit(text.str(), out);
    return 0;
}

int cmd_compare(const std::string& bundle_path, const std::string& mode_name, bool ignore_n,
                std::size_t n, const std::string& out) {
    const NetBundle bundle = load_bundle(bundle_path);
    const NormMode mode = parse_mode(mode_name);
    const BoundReport report =
        architecture_comparison(bundle.spec, bundle.weights, mode, ignore_n, n);
    std::ostringstream text;
    write_csv_row(text, {"convention", "value"});
    write_csv_row(text, {"expressions",
                         "bare asymptotic expressions; unit constants; no log factors"});
    write_csv_row(text, {"norm_mode", mode_name});
    write_csv_row(text, {"n_factors", report.ignore_n ? "dropped" : std::to_string(n)});
    text << "\n";
    write_csv_row(text, {"family", "log10", "linear"});
    for (const FamilyValue& v : report.values) {
        write_csv_row(text, {family_name(v.family), format_full(v.log10_value),
                             format_full(v.linear_value)});
    }
    text << "\n";
    write_csv_row(text, {"layer", "kind", "a", "s", "n21"});
    for (const LayerNormRow& row : report.layer_table) {
        write_csv_row(text, {std::to_string(row.layer), layer_kind_name(row.kind),
                             format_full(row.norms.a), format_full(row.norms.s),
                             format_full(row.norms.n21)});
    }
    emit(text.str(), out);
    return 0;
}

int cmd_margins(const std::string& bundle_path, const std::string& data_file,
                const std::string& labels_file, double eta, const std::string& out) {
    const NetBundle bundle = load_bundle(bundle_path);
    // Data rows are examples; forward evaluation wants one column per example.
    const DenseMatrix examples = read_csv_matrix(data_file);
    const std::vector<std::size_t> labels = read_labels(labels_file);
    if (labels.size() != examples.rows()) {
        throw ShapeMismatch("data has " + std::to_string(examples.rows()) + " examples but " +
                            std::to_string(labels.size()) + " labels");
    }
    const DenseMatrix logits = forward(bundle.spec, bundle.weights, transpose(examples));
    RiskSample sample{logits, labels};
    validate_sample(sample);

    std::ostringstream text;
    write_csv_row(text, {"index", "label", "margin", "ramp_loss"});
    std::vector<double> column(logits.rows());
    for (std::size_t p = 0; p < logits.cols(); ++p) {
        for (std::size_t j = 0; j < logits.rows(); ++j) {
            column[j] = logits(j, p);
        }
        const double mg = margin(column, labels[p]);
        const double loss = ramp_loss(column, labels[p], eta);
        write_csv_row(text, {std::to_string(p + 1), std::to_string(labels[p]),
                             format_full(mg), format_full(loss)});
    }
    text << "\n";
    write_csv_row(text, {"metric", "value"});
    write_csv_row(text, {"empirical_ramp_risk", format_full(empirical_ramp_risk(sample, eta))});
    write_csv_row(text,
                  {"empirical_zero_one_risk", format_full(empirical_zero_one_risk(sample))});
    emit(text.str(), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convolution lowering, layer norms, and generalization bound reports"};
    app.require_subcommand(1);

    std::string bundle_path;
    std::string out_path;
    std::string mode_name = "bounded";
    std::string data_file;
    std::string labels_file;
    std::string risk_file;
    std::size_t layer = 1;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    double eta = 1.0;
    double delta = 0.05;
    std::size_t n = 1;
    double x_fnorm = 0.0;
    bool ignore_n = false;

    auto* lower = app.add_subcommand("lower", "Emit one layer's fully connected matrix as CSV");
    lower->add_option("bundle", bundle_path)->required();
    lower->add_option("--layer", layer, "1-based layer index")->required();
    lower->add_option("--out", out_path);

    auto* norms = app.add_subcommand("norms", "Per-layer norm table");
    norms->add_option("bundle", bundle_path)->required();
    norms->add_option("--mode", mode_name)
        ->required()
        ->check(CLI::IsMember({"exact", "bounded"}));
    norms->add_option("--out", out_path);

    auto* verify = app.add_subcommand("verify", "Run the oracle property suite");
    verify->add_option("bundle", bundle_path)->required();
    verify->add_option("--trials", trials);
    verify->add_option("--seed", seed);

    auto* complexity = app.add_subcommand("complexity", "Sensitive complexity of the network");
    complexity->add_option("bundle", bundle_path)->required();
    complexity->add_option("--eta", eta)->required();
    complexity->add_option("--mode", mode_name)->check(CLI::IsMember({"exact", "bounded"}));
    complexity->add_option("--out", out_path);

    auto* bound = app.add_subcommand("bound", "Margin-based generalization bound");
    bound->add_option("bundle", bundle_path)->required();
    bound->add_option("--eta", eta)->required();
    bound->add_option("--delta", delta)->required();
    bound->add_option("--n", n)->required();
    bound->add_option("--x-fnorm", x_fnorm)->required();
    bound->add_option("--risk-file", risk_file);
    bound->add_option("--mode", mode_name)->check(CLI::IsMember({"exact", "bounded"}));
    bound->add_option("--out", out_path);

    auto* compare = app.add_subcommand("compare", "Six-family bound comparison report");
    compare->add_option("bundle", bundle_path)->required();
    compare->add_option("--mode", mode_name)
        ->required()
        ->check(CLI::IsMember({"exact", "bounded"}));
    compare->add_flag("--ignore-n", ignore_n, "Drop all sample-size factors");
    compare->add_option("--n", n, "Sample size when n factors are kept");
    compare->add_option("--out", out_path);

    auto* margins = app.add_subcommand("margins", "Margin distribution and empirical risks");
    margins->add_option("bundle", bundle_path)->required();
    margins->add_option("--data", data_file, "CSV, one example per row")->required();
    margins->add_option("--labels", labels_file, "one 1-based label per line")->required();
    margins->add_option("--eta", eta)->required();
    margins->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (lower->parsed()) {
            return cmd_lower(bundle_path, layer, out_path);
        }
        if (norms->parsed()) {
            return cmd_norms(bundle_path, mode_name, out_path);
        }
        if (verify->parsed()) {
            return cmd_verify(bundle_path, trials, seed);
        }
        if (complexity->parsed()) {
            return cmd_complexity(bundle_path, eta, mode_name, out_path);
        }
        if (bound->parsed()) {
            return cmd_bound(bundle_path, eta, delta, n, x_fnorm, risk_file, mode_name,
                             out_path);
        }
        if (compare->parsed()) {
            return cmd_compare(bundle_path, mode_name, ignore_n, n, out_path);
        }
        if (margins->parsed()) {
            return cmd_margins(bundle_path, data_file, labels_file, eta, out_path);
        }
    } catch (const convbound::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
