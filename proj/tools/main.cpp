// medguard: three-phase intrusion-detection pipeline for IoT healthcare
// traffic. One binary, subcommand style; every command is deterministic
// under (inputs, --seed) and emits a manifest with input/output digests.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medguard/agent/agent.hpp"
#include "medguard/agent/stream.hpp"
#include "medguard/core/csv.hpp"
#include "medguard/core/schema.hpp"
#include "medguard/core/synth.hpp"
#include "medguard/ledger/chain.hpp"
#include "medguard/manifest.hpp"
#include "medguard/nn/model_io.hpp"
#include "medguard/nn/train.hpp"
#include "medguard/patterns/store.hpp"
#include "medguard/stats/crossval.hpp"
#include "medguard/stats/metrics.hpp"
#include "medguard/stats/tests.hpp"
#include "medguard/woa/binary.hpp"

namespace {

using nlohmann::json;
using namespace medguard;

FeatureSchema load_schema(const std::string& path) {
    return schema_from_json(json::parse(read_file(path)));
}

json mask_report_to_json(const SelectionResult& sel, std::uint64_t seed, const json& config) {
    json j;
    j["mask"] = sel.mask.bits;
    j["fitness"] = sel.fitness;
    j["history"] = sel.history;
    j["seed"] = seed;
    j["config"] = config;
    return j;
}

FeatureMask mask_from_file(const std::string& path) {
    const auto j = json::parse(read_file(path));
    return FeatureMask(j.at("mask").get<std::vector<std::uint8_t>>());
}

json metric_to_json(const MetricValue& m) { return {{"value", m.value}, {"defined", m.defined}}; }

json binary_metrics_to_json(const BinaryMetrics& m) {
    return {{"precision", metric_to_json(m.precision)},
            {"recall", metric_to_json(m.recall)},
            {"f1", metric_to_json(m.f1)},
            {"accuracy", metric_to_json(m.accuracy)},
            {"detection_rate", metric_to_json(m.detection_rate)},
            {"false_alarm_rate", metric_to_json(m.false_alarm_rate)}};
}

std::string metrics_csv_row(const std::string& name, const BinaryMetrics& m) {
    return name + ',' + std::to_string(m.precision.value) + ',' + std::to_string(m.recall.value) + ',' +
           std::to_string(m.f1.value) + ',' + std::to_string(m.accuracy.value) + ',' +
           std::to_string(m.detection_rate.value) + ',' + std::to_string(m.false_alarm_rate.value) + '\n';
}

json stat_test_to_json(const StatTestResult& r) {
    return {{"statistic", r.statistic},
            {"p_value", r.p_value},
            {"significant", r.significant},
            {"n_pairs", r.n_pairs}};
}

struct CommonTrainFlags {
    TrainConfig cfg;

    void attach(CLI::App* cmd) {
        cmd->add_option("--epochs", cfg.epochs, "training epochs");
        cmd->add_option("--batch-size", cfg.batch_size, "mini-batch size");
        cmd->add_option("--learning-rate", cfg.learning_rate, "Adam learning rate");
        cmd->add_option("--dropout", cfg.dropout, "dropout rate on LSTM outputs");
        cmd->add_option("--units", cfg.units_per_layer, "LSTM units per layer");
        cmd->add_option("--layers", cfg.num_layers, "stacked BiLSTM layers");
        cmd->add_option("--chunks", cfg.sequence_chunks, "timesteps a record is folded into");
        cmd->add_option("--validation-fraction", cfg.validation_fraction,
                        "held-out fraction for the per-epoch curves");
    }

    json snapshot() const {
        return {{"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"learning_rate", cfg.learning_rate},
                {"dropout", cfg.dropout},
                {"units_per_layer", cfg.units_per_layer},
                {"num_layers", cfg.num_layers},
                {"sequence_chunks", cfg.sequence_chunks},
                {"validation_fraction", cfg.validation_fraction}};
    }
};

int run_ingest(const std::string& data, const std::string& schema_path, bool header, bool do_normalize,
               const std::string& out, const std::string& stats_path, std::string manifest_path) {
    ManifestBuilder manifest("ingest");
    manifest.add_input(data);
    manifest.add_input(schema_path);
    manifest.set_config({{"header", header}, {"normalize", do_normalize}});

    const FeatureSchema schema = load_schema(schema_path);
    Dataset d = load_csv(data, schema, header);
    if (do_normalize) d = normalize(d);

    write_file_atomic(out, to_csv(d, header));
    manifest.add_output(out);

    json stats;
    stats["rows"] = d.row_count();
    stats["features"] = d.feature_count();
    stats["feature_min"] = d.feature_min;
    stats["feature_max"] = d.feature_max;
    stats["normalized"] = d.normalized;
    json class_counts = json::object();
    const auto counts = d.class_counts();
    for (const auto& [name, code] : d.schema.label_map)
        class_counts[name] = counts[static_cast<std::size_t>(code)];
    stats["class_counts"] = class_counts;
    if (!stats_path.empty()) {
        write_file_atomic(stats_path, stats.dump(2) + "\n");
        manifest.add_output(stats_path);
    }

    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "ingested " << d.row_count() << " rows, " << d.feature_count() << " features\n";
    return 0;
}

int run_select_features(const std::string& data, const std::string& schema_path, bool header,
                        std::uint64_t seed, BinaryWoaConfig cfg, const std::string& out,
                        std::string manifest_path) {
    ManifestBuilder manifest("select-features");
    manifest.add_input(data);
    manifest.add_input(schema_path);
    manifest.set_seed(seed);
    cfg.woa.seed = seed;

    const json config = {{"population", cfg.woa.population},
                         {"max_iters", cfg.woa.max_iters},
                         {"convergence_eps", cfg.woa.convergence_eps},
                         {"spiral_b", cfg.woa.spiral_b},
                         {"lambda", cfg.lambda_weight},
                         {"beta", cfg.beta_weight},
                         {"surrogate_k", cfg.surrogate_k},
                         {"validation_fraction", cfg.validation_fraction}};
    manifest.set_config(config);

    const Dataset d = normalize(load_csv(data, load_schema(schema_path), header));
    const SelectionResult sel = select_features(d, cfg);

    write_file_atomic(out, mask_report_to_json(sel, seed, config).dump(2) + "\n");
    manifest.add_output(out);
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "selected " << sel.mask.popcount() << "/" << sel.mask.size()
              << " features, fitness " << sel.fitness << "\n";
    return 0;
}

int run_train(const std::string& data, const std::string& schema_path, bool header,
              const std::string& mask_path, CommonTrainFlags flags, std::uint64_t seed,
              const std::string& out, const std::string& curves_path, std::string manifest_path) {
    ManifestBuilder manifest("train");
    manifest.add_input(data);
    manifest.add_input(schema_path);
    manifest.add_input(mask_path);
    manifest.set_seed(seed);
    flags.cfg.seed = seed;
    manifest.set_config(flags.snapshot());

    const Dataset d = normalize(load_csv(data, load_schema(schema_path), header));
    const FeatureMask mask = mask_from_file(mask_path);
    const TrainResult result = train(d, mask, flags.cfg);

    write_file_atomic(out, model_to_json(result.model).dump() + "\n");
    manifest.add_output(out);
    if (!curves_path.empty()) {
        write_file_atomic(curves_path, curves_to_csv(result.curves));
        manifest.add_output(curves_path);
    }
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    if (!result.curves.empty()) {
        const auto& last = result.curves.back();
        std::cout << "trained " << flags.cfg.epochs << " epochs, final train acc "
                  << last.train_accuracy << ", val acc " << last.val_accuracy << "\n";
    } else {
        std::cout << "trained 0 epochs (initialization only)\n";
    }
    return 0;
}

int run_evaluate(const std::string& data, const std::string& schema_path, bool header,
                 const std::string& mask_path, const std::string& model_path, const std::string& out,
                 const std::string& csv_path, std::string manifest_path) {
    ManifestBuilder manifest("evaluate");
    manifest.add_input(data);
    manifest.add_input(schema_path);
    manifest.add_input(mask_path);
    manifest.add_input(model_path);

    const Dataset d = normalize(load_csv(data, load_schema(schema_path), header));
    const FeatureMask mask = mask_from_file(mask_path);
    const BiLstmModel model = model_from_json(json::parse(read_file(model_path)));

    const auto preds = predict(model, d, mask);
    std::vector<int> y_true;
    std::vector<int> y_pred;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        y_true.push_back(d.rows[i].label);
        y_pred.push_back(preds[i].label);
    }

    std::vector<std::string> class_names(d.schema.class_count());
    for (const auto& [name, code] : d.schema.label_map) class_names[static_cast<std::size_t>(code)] = name;

    const ConfusionCounts binary_counts = confusion(y_true, y_pred, d.schema.positive_class);
    const MulticlassReport multi = multiclass_report(y_true, y_pred, class_names);

    json report;
    report["rows"] = y_true.size();
    report["positive_class"] = d.schema.positive_class;
    report["binary"] = binary_metrics_to_json(BinaryMetrics::from(binary_counts));
    report["binary_counts"] = {{"tp", binary_counts.tp},
                               {"tn", binary_counts.tn},
                               {"fp", binary_counts.fp},
                               {"fn", binary_counts.fn}};
    json per_class = json::array();
    for (const auto& cr : multi.per_class)
        per_class.push_back({{"class", cr.class_name}, {"metrics", binary_metrics_to_json(cr.metrics)}});
    report["per_class"] = per_class;
    report["macro"] = binary_metrics_to_json(multi.macro);

    write_file_atomic(out, report.dump(2) + "\n");
    manifest.add_output(out);
    if (!csv_path.empty()) {
        std::string csv = "class,precision,recall,f1,accuracy,detection_rate,false_alarm_rate\n";
        for (const auto& cr : multi.per_class) csv += metrics_csv_row(cr.class_name, cr.metrics);
        csv += metrics_csv_row("macro", multi.macro);
        write_file_atomic(csv_path, csv);
        manifest.add_output(csv_path);
    }
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "evaluated " << y_true.size() << " rows, accuracy "
              << accuracy(binary_counts).value << "\n";
    return 0;
}

int run_crossval(const std::string& data, const std::string& schema_path, bool header,
                 const std::string& mask_path, CommonTrainFlags flags, std::size_t k,
                 std::uint64_t seed, const std::string& out, std::string manifest_path) {
    ManifestBuilder manifest("crossval");
    manifest.add_input(data);
    manifest.add_input(schema_path);
    if (!mask_path.empty()) manifest.add_input(mask_path);
    manifest.set_seed(seed);
    json config = flags.snapshot();
    config["k"] = k;
    manifest.set_config(config);

    const Dataset d = normalize(load_csv(data, load_schema(schema_path), header));
    const FeatureMask mask = mask_path.empty() ? FeatureMask::all_ones(d.feature_count())
                                               : mask_from_file(mask_path);
    flags.cfg.seed = seed;

    const TrainConfig train_cfg = flags.cfg;
    const Pipeline pipeline = [&](const Dataset& tr, const Dataset& te) {
        const TrainResult fitted = train(tr, mask, train_cfg);
        std::vector<int> labels;
        for (const auto& p : predict(fitted.model, te, mask)) labels.push_back(p.label);
        return labels;
    };

    const CrossvalReport report = crossval_report(d, pipeline, k, seed);

    json j;
    j["k"] = k;
    json folds = json::array();
    for (const auto& fold : report.per_fold) folds.push_back(binary_metrics_to_json(fold));
    j["per_fold"] = folds;
    const auto agg = [](const MetricAggregate& a) { return json{{"mean", a.mean}, {"sd", a.sd}}; };
    j["summary"] = {{"precision", agg(report.precision)},
                    {"recall", agg(report.recall)},
                    {"f1", agg(report.f1)},
                    {"accuracy", agg(report.accuracy)},
                    {"detection_rate", agg(report.detection_rate)},
                    {"false_alarm_rate", agg(report.false_alarm_rate)}};
    for (const std::string name :
         {"precision", "recall", "f1", "accuracy", "detection_rate", "false_alarm_rate"})
        j["series"][name] = metric_series(report, name);

    write_file_atomic(out, j.dump(2) + "\n");
    manifest.add_output(out);
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "crossval k=" << k << ", accuracy " << report.accuracy.mean << " +- "
              << report.accuracy.sd << "\n";
    return 0;
}

int run_stats(const std::string& a_path, const std::string& b_path, const std::string& out,
              std::string manifest_path) {
    ManifestBuilder manifest("stats");
    manifest.add_input(a_path);
    manifest.add_input(b_path);

    const auto a = json::parse(read_file(a_path)).get<std::vector<double>>();
    const auto b = json::parse(read_file(b_path)).get<std::vector<double>>();

    json j;
    j["n_pairs"] = a.size();
    j["paired_t_test"] = stat_test_to_json(paired_t_test(a, b));
    try {
        j["wilcoxon_signed_rank"] = stat_test_to_json(wilcoxon_signed_rank(a, b));
    } catch (const std::runtime_error& e) {
        j["wilcoxon_signed_rank"] = {{"error", e.what()}};
    }

    write_file_atomic(out, j.dump(2) + "\n");
    manifest.add_output(out);
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "t-test p=" << j["paired_t_test"]["p_value"] << "\n";
    return 0;
}

int run_ledger_verify(const std::string& path) {
    const Ledger ledger = ledger_from_jsonl(read_file(path));
    const ChainStatus status = ledger.verify_chain();
    if (status.ok) {
        std::cout << "ok: " << ledger.size() << " blocks\n";
        return 0;
    }
    std::cout << "broken_at=" << status.broken_at << " cause=" << to_string(status.cause) << "\n";
    return 1;
}

int run_patterns_import(const std::string& in, const std::string& store_path, std::size_t dim,
                        int benign, std::string manifest_path) {
    ManifestBuilder manifest("patterns-import");
    manifest.add_input(in);
    const PatternStore incoming = store_from_jsonl(read_file(in), dim, benign);
    PatternStore store(dim, benign);
    if (std::filesystem::exists(store_path)) {
        manifest.add_input(store_path);
        store = store_from_jsonl(read_file(store_path), dim, benign);
    }
    for (const auto& p : incoming.patterns())
        store.insert(p.features, p.label, p.security_level, p.source);
    write_file_atomic(store_path, store_to_jsonl(store));
    manifest.add_output(store_path);
    if (manifest_path.empty()) manifest_path = store_path + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "store now holds " << store.size() << " patterns\n";
    return 0;
}

int run_patterns_export(const std::string& store_path, const std::string& out, std::size_t dim,
                        int benign, std::string manifest_path) {
    ManifestBuilder manifest("patterns-export");
    manifest.add_input(store_path);
    const PatternStore store = store_from_jsonl(read_file(store_path), dim, benign);
    write_file_atomic(out, store_to_jsonl(store));
    manifest.add_output(out);
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "exported " << store.size() << " patterns\n";
    return 0;
}

int run_simulate(const std::string& data, const std::string& schema_path, bool header,
                 const std::string& model_path, const std::string& mask_path,
                 const std::string& patterns_path, double ap, std::size_t n, std::uint64_t seed,
                 std::size_t devices, double theta, std::size_t k, bool fast_path,
                 const std::string& out, const std::string& decisions_path,
                 const std::string& ledger_path, std::string manifest_path) {
    ManifestBuilder manifest("agent-simulate");
    manifest.add_input(data);
    manifest.add_input(schema_path);
    manifest.add_input(model_path);
    manifest.add_input(mask_path);
    if (!patterns_path.empty()) manifest.add_input(patterns_path);
    manifest.set_seed(seed);
    manifest.set_config({{"ap", ap},
                         {"n", n},
                         {"devices", devices},
                         {"theta", theta},
                         {"k", k},
                         {"fast_path", fast_path}});

    const FeatureSchema schema = load_schema(schema_path);
    const Dataset pool = load_csv(data, schema, header);
    const FeatureMask mask = mask_from_file(mask_path);
    const BiLstmModel model = model_from_json(json::parse(read_file(model_path)));
    const int benign = schema.resolve_benign_class();

    PatternStore store = patterns_path.empty()
                             ? PatternStore(pool.feature_count(), benign)
                             : store_from_jsonl(read_file(patterns_path), pool.feature_count(), benign);
    store.set_model_ref(model_path);

    Rng rng(seed);
    DeviceRegistry registry;
    std::vector<std::string> device_ids;
    for (std::size_t i = 0; i < devices; ++i) {
        device_ids.push_back("device-" + std::to_string(i));
        registry.enroll(device_ids.back(), rng);
    }
    Bytes agent_key(32);
    for (auto& b : agent_key) b = static_cast<std::uint8_t>(rng.next_u64() & 0xff);

    AgentConfig agent_cfg;
    agent_cfg.theta = theta;
    agent_cfg.k = k;
    agent_cfg.fast_path_enabled = fast_path;
    agent_cfg.benign_class = benign;
    Agent agent(agent_cfg, registry, model, mask, pool.feature_min, pool.feature_max, std::move(store),
                agent_key, logical_clock(1));

    const Clock sign_clock = logical_clock(0);
    const auto items = make_request_stream(pool, registry, device_ids, n, ap, rng, sign_clock, benign);
    const StreamReport report = replay_stream(agent, items, ap);

    write_file_atomic(ledger_path, ledger_to_jsonl(agent.ledger()));
    write_file_atomic(decisions_path, decisions_to_csv(report));

    json j;
    j["n"] = report.n;
    j["attack_percentage"] = report.attack_percentage;
    j["dr"] = report.dr.value;
    j["dr_defined"] = report.dr.defined;
    j["far"] = report.far.value;
    j["far_defined"] = report.far.defined;
    j["counts"] = {{"tp", report.counts.tp},
                   {"tn", report.counts.tn},
                   {"fp", report.counts.fp},
                   {"fn", report.counts.fn}};
    j["per_stage_counts"] = report.per_stage_counts;
    j["ledger_path"] = ledger_path;
    j["ledger_blocks"] = agent.ledger().size();
    j["chain_ok"] = agent.ledger().verify_chain().ok;
    write_file_atomic(out, j.dump(2) + "\n");

    manifest.add_output(out);
    manifest.add_output(decisions_path);
    manifest.add_output(ledger_path);
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "simulated " << n << " requests at ap=" << ap << ": dr=" << report.dr.value
              << " far=" << report.far.value << " blocks=" << agent.ledger().size() << "\n";
    return 0;
}

int run_synth(std::size_t rows, std::size_t informative, std::size_t noise, std::size_t classes,
              std::uint64_t seed, const std::string& out, const std::string& schema_out,
              std::string manifest_path) {
    ManifestBuilder manifest("synth");
    manifest.set_seed(seed);
    manifest.set_config(
        {{"rows", rows}, {"informative", informative}, {"noise", noise}, {"classes", classes}});

    const SynthResult synth = synth_generate(rows, informative, noise, classes, seed);
    write_file_atomic(out, to_csv(synth.data));
    manifest.add_output(out);
    if (!schema_out.empty()) {
        write_file_atomic(schema_out, schema_to_json(synth.data.schema).dump(2) + "\n");
        manifest.add_output(schema_out);
    }
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";
    manifest.write(manifest_path);
    std::cout << "generated " << synth.data.row_count() << " rows, informative indices 0.."
              << informative - 1 << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-phase intrusion-detection agent for IoT healthcare traffic"};
    app.require_subcommand(1);

    // shared option storage
    std::string data, schema_path, out, manifest_path, mask_path, model_path, curves_path;
    std::string csv_path, stats_path, a_path, b_path, in_path, store_path, patterns_path;
    std::string decisions_path = "decisions.csv";
    std::string ledger_path = "ledger.jsonl";
    bool header = false;
    bool do_normalize = false;
    bool no_fast_path = false;
    std::uint64_t seed = 0;
    std::size_t k = 10;
    std::size_t n = 1000;
    std::size_t devices = 8;
    std::size_t dim = 0;
    int benign = 0;
    double ap = 0.3;
    double theta = 0.05;
    std::size_t pattern_k = 5;
    BinaryWoaConfig woa_cfg;
    CommonTrainFlags train_flags;
    CommonTrainFlags crossval_flags;

    auto* ingest = app.add_subcommand("ingest", "load, validate and re-emit a CSV corpus");
    ingest->add_option("--data", data, "input CSV")->required();
    ingest->add_option("--schema", schema_path, "schema JSON")->required();
    ingest->add_flag("--header", header, "input has a header row");
    ingest->add_flag("--normalize", do_normalize, "min-max normalize features");
    ingest->add_option("--out", out, "canonical CSV output")->required();
    ingest->add_option("--stats", stats_path, "dataset stats JSON output");
    ingest->add_option("--manifest", manifest_path, "manifest path");

    auto* select = app.add_subcommand("select-features", "binary whale-optimization feature selection");
    select->add_option("--data", data)->required();
    select->add_option("--schema", schema_path)->required();
    select->add_flag("--header", header);
    select->add_option("--seed", seed, "master seed");
    select->add_option("--out", out, "mask JSON output")->required();
    select->add_option("--population", woa_cfg.woa.population, "whales");
    select->add_option("--iters", woa_cfg.woa.max_iters, "max iterations");
    select->add_option("--lambda", woa_cfg.lambda_weight, "error-rate weight");
    select->add_option("--beta", woa_cfg.beta_weight, "subset-size weight");
    select->add_option("--surrogate-k", woa_cfg.surrogate_k, "neighbors for the wrapper fitness");
    select->add_option("--validation-fraction", woa_cfg.validation_fraction, "wrapper holdout fraction");
    select->add_option("--manifest", manifest_path);

    auto* train_cmd = app.add_subcommand("train", "train the BiLSTM classifier");
    train_cmd->add_option("--data", data)->required();
    train_cmd->add_option("--schema", schema_path)->required();
    train_cmd->add_flag("--header", header);
    train_cmd->add_option("--mask", mask_path, "mask JSON from select-features")->required();
    train_cmd->add_option("--seed", seed);
    train_cmd->add_option("--out", out, "model JSON output")->required();
    train_cmd->add_option("--curves", curves_path, "per-epoch curves CSV");
    train_flags.attach(train_cmd);
    train_cmd->add_option("--manifest", manifest_path);

    auto* evaluate = app.add_subcommand("evaluate", "score a trained model on a labeled corpus");
    evaluate->add_option("--data", data)->required();
    evaluate->add_option("--schema", schema_path)->required();
    evaluate->add_flag("--header", header);
    evaluate->add_option("--mask", mask_path)->required();
    evaluate->add_option("--model", model_path)->required();
    evaluate->add_option("--out", out, "report JSON")->required();
    evaluate->add_option("--csv", csv_path, "per-class metrics CSV");
    evaluate->add_option("--manifest", manifest_path);

    auto* crossval = app.add_subcommand("crossval", "k-fold cross-validated training");
    crossval->add_option("--data", data)->required();
    crossval->add_option("--schema", schema_path)->required();
    crossval->add_flag("--header", header);
    crossval->add_option("--mask", mask_path, "optional mask JSON");
    crossval->add_option("--k", k, "folds");
    crossval->add_option("--seed", seed);
    crossval->add_option("--out", out, "report JSON")->required();
    crossval_flags.attach(crossval);
    crossval->add_option("--manifest", manifest_path);

    auto* stats_cmd = app.add_subcommand("stats", "paired t-test and Wilcoxon signed-rank");
    stats_cmd->add_option("--a", a_path, "JSON array of per-fold scores")->required();
    stats_cmd->add_option("--b", b_path, "JSON array of per-fold scores")->required();
    stats_cmd->add_option("--out", out, "result JSON")->required();
    stats_cmd->add_option("--manifest", manifest_path);

    auto* ledger_cmd = app.add_subcommand("ledger", "hash-chain operations");
    auto* ledger_verify = ledger_cmd->add_subcommand("verify", "verify a ledger file");
    std::string ledger_file;
    ledger_verify->add_option("file", ledger_file, "ledger JSON-lines file")->required();

    auto* patterns = app.add_subcommand("patterns", "pattern store operations");
    auto* patterns_import = patterns->add_subcommand("import", "merge patterns into a store file");
    patterns_import->add_option("--in", in_path)->required();
    patterns_import->add_option("--store", store_path)->required();
    patterns_import->add_option("--dim", dim, "feature dimension")->required();
    patterns_import->add_option("--benign", benign, "benign class index");
    patterns_import->add_option("--manifest", manifest_path);
    auto* patterns_export = patterns->add_subcommand("export", "canonicalize a store file");
    patterns_export->add_option("--store", store_path)->required();
    patterns_export->add_option("--out", out)->required();
    patterns_export->add_option("--dim", dim, "feature dimension")->required();
    patterns_export->add_option("--benign", benign, "benign class index");
    patterns_export->add_option("--manifest", manifest_path);

    auto* agent_cmd = app.add_subcommand("agent", "security agent operations");
    auto* simulate = agent_cmd->add_subcommand("simulate", "replay a labeled request stream");
    simulate->add_option("--data", data, "labeled raw corpus the stream samples")->required();
    simulate->add_option("--schema", schema_path)->required();
    simulate->add_flag("--header", header);
    simulate->add_option("--model", model_path)->required();
    simulate->add_option("--mask", mask_path)->required();
    simulate->add_option("--patterns", patterns_path, "seed pattern store JSON-lines");
    simulate->add_option("--ap", ap, "attack percentage in (0,1)");
    simulate->add_option("--n", n, "stream length");
    simulate->add_option("--seed", seed);
    simulate->add_option("--devices", devices, "enrolled device count");
    simulate->add_option("--theta", theta, "pattern recognition radius");
    simulate->add_option("--k", pattern_k, "nearest patterns reported");
    simulate->add_flag("--no-fast-path", no_fast_path, "recognized-benign still faces the classifier");
    simulate->add_option("--out", out, "stream report JSON")->required();
    simulate->add_option("--decisions", decisions_path, "decision log CSV");
    simulate->add_option("--ledger", ledger_path, "ledger JSON-lines output");
    simulate->add_option("--manifest", manifest_path);

    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    std::size_t synth_rows = 2000, synth_informative = 5, synth_noise = 15, synth_classes = 2;
    synth->add_option("--rows", synth_rows);
    synth->add_option("--informative", synth_informative);
    synth->add_option("--noise", synth_noise);
    synth->add_option("--classes", synth_classes);
    synth->add_option("--seed", seed);
    synth->add_option("--out", out, "CSV output")->required();
    std::string schema_out;
    synth->add_option("--schema-out", schema_out, "schema JSON output");
    synth->add_option("--manifest", manifest_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest)
            return run_ingest(data, schema_path, header, do_normalize, out, stats_path, manifest_path);
        if (*select)
            return run_select_features(data, schema_path, header, seed, woa_cfg, out, manifest_path);
        if (*train_cmd)
            return run_train(data, schema_path, header, mask_path, train_flags, seed, out, curves_path,
                             manifest_path);
        if (*evaluate)
            return run_evaluate(data, schema_path, header, mask_path, model_path, out, csv_path,
                                manifest_path);
        if (*crossval)
            return run_crossval(data, schema_path, header, mask_path, crossval_flags, k, seed, out,
                                manifest_path);
        if (*stats_cmd) return run_stats(a_path, b_path, out, manifest_path);
        if (*ledger_verify) return run_ledger_verify(ledger_file);
        if (*patterns_import)
            return run_patterns_import(in_path, store_path, dim, benign, manifest_path);
        if (*patterns_export)
            return run_patterns_export(store_path, out, dim, benign, manifest_path);
        if (*simulate)
            return run_simulate(data, schema_path, header, model_path, mask_path, patterns_path, ap, n,
                                seed, devices, theta, pattern_k, !no_fast_path, out, decisions_path,
                                ledger_path, manifest_path);
        if (*synth)
            return run_synth(synth_rows, synth_informative, synth_noise, synth_classes, seed, out,
                             schema_out, manifest_path);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
