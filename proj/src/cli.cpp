// Copyright 2026 The qtnseq Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtnseq/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qtnseq/checkpoint.hpp"
#include "qtnseq/error.hpp"
#include "qtnseq/rng.hpp"
#include "qtnseq/train.hpp"

namespace qtn {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Topology topology_from(const std::string& s) {
    if (s == "ptn") {
        return Topology::Path;
    }
    if (s == "ctn") {
        return Topology::Convolutional;
    }
    throw Error(Errc::InvalidConfig,
                "invalid topology '" + s + "' (valid: ptn, ctn)");
}

Sharing sharing_from(const std::string& s) {
    if (s == "uniform") {
        return Sharing::Uniform;
    }
    if (s == "hierarchical") {
        return Sharing::Hierarchical;
    }
    throw Error(Errc::InvalidConfig,
                "invalid sharing '" + s + "' (valid: uniform, hierarchical)");
}

Mode mode_from(const std::string& s) {
    if (s == "postselect") {
        return Mode::Postselect;
    }
    if (s == "discard") {
        return Mode::Discard;
    }
    throw Error(Errc::InvalidConfig,
                "invalid mode '" + s + "' (valid: postselect, discard)");
}

Family family_from(const std::string& s) {
    if (s == "sim14") {
        return Family::Sim14;
    }
    if (s == "sim15") {
        return Family::Sim15;
    }
    if (s == "iqp") {
        return Family::IQP;
    }
    throw Error(Errc::InvalidConfig,
                "invalid family '" + s + "' (valid: sim14, sim15, iqp)");
}

InitScheme init_from(const std::string& s) {
    if (s == "uniform") {
        return InitScheme::UniformAngle;
    }
    if (s == "small_normal") {
        return InitScheme::SmallNormal;
    }
    throw Error(Errc::InvalidConfig,
                "invalid init '" + s + "' (valid: uniform, small_normal)");
}

int exit_code_for(Errc code) {
    switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidMotif:
    case Errc::InvalidFoldCount:
    case Errc::SequenceTooLong:
    case Errc::MalformedFasta:
    case Errc::BadCheckpoint:
    case Errc::TooFewRecords:
    case Errc::EmptySequence:
    case Errc::EmptySplit:
        return 2;
    default:
        return 1;
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) {
        throw Error(Errc::InvalidConfig,
                    "cannot write file: " + path.string());
    }
    f << text;
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
    std::string fasta;
    std::string labels;
    std::string out;
    int min_len = 80;
    int max_len = 200;
    std::vector<double> ratios{0.86, 0.07, 0.07};
    std::uint64_t seed = 7;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
    if (!fs::exists(a.fasta)) {
        err << "error: fasta file not found: " << a.fasta << "\n";
        return 2;
    }
    if (!fs::exists(a.labels)) {
        err << "error: label file not found: " << a.labels << "\n";
        return 2;
    }
    std::ifstream fasta_in(a.fasta);
    const auto fasta = parse_fasta(fasta_in);
    std::ifstream labels_in(a.labels);
    const auto labels = load_labels_tsv(labels_in);

    FilterSummary summary;
    const auto records =
        filter_and_label(fasta, labels, a.min_len, a.max_len, &summary);

    fs::create_directories(a.out);
    {
        std::ofstream ds(fs::path(a.out) / "dataset.tsv");
        write_dataset(ds, records);
    }

    json manifest;
    manifest["parsed"] = summary.parsed;
    manifest["kept"] = summary.kept;
    manifest["dropped"] = {{"short", summary.dropped_short},
                           {"long", summary.dropped_long},
                           {"unlabeled", summary.dropped_unlabeled}};
    manifest["label_rule"] = {{"ambiguous_locations", labels.ambiguous},
                              {"unmatched_locations", labels.unmatched}};
    manifest["unk_substitutions"] = summary.unk_substitutions;
    manifest["class_counts"] = {{"cytosol", summary.kept_per_class[0]},
                                {"membrane", summary.kept_per_class[1]}};
    if (records.size() >= 3) {
        const auto splits =
            split(records, {a.ratios[0], a.ratios[1], a.ratios[2]}, a.seed);
        manifest["splits"] = {{"train", splits.train.size()},
                              {"validation", splits.validation.size()},
                              {"test", splits.test.size()},
                              {"seed", a.seed},
                              {"ratios", a.ratios}};
    }
    write_text_file(fs::path(a.out) / "manifest.json",
                    manifest.dump(2) + "\n");

    if (summary.kept == 0) {
        err << "warning: no records retained after filtering\n";
    }
    out << "prepared " << summary.kept << " records ("
        << summary.kept_per_class[0] << " cytosol, "
        << summary.kept_per_class[1] << " membrane) -> " << a.out << "\n";
    return 0;
}

// ------------------------------------------------------------------ train

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> topology;
    std::optional<std::string> sharing;
    std::optional<std::string> out;
};

struct TrainRun {
    TrainConfig config;
    std::vector<SequenceRecord> records;
    std::array<double, 3> ratios{0.86, 0.07, 0.07};
    std::string out_dir;
};

json read_json_file(const std::string& path) {
    if (!fs::exists(path)) {
        throw Error(Errc::InvalidConfig, "config file not found: " + path);
    }
    std::ifstream in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig,
                    "config file " + path + ": " + e.what());
    }
    return j;
}

TrainRun read_train_config(const std::string& path, const Overrides& ov) {
    const json j = read_json_file(path);

    static const std::vector<std::string> known{
        "dataset",    "synthetic",    "topology",
        "sharing",    "mode",         "q",
        "qprime",     "depth",        "family",
        "learning_rate", "weight_decay", "batch_size",
        "max_epochs", "early_stop_patience", "k_folds",
        "seed",       "init",         "split_ratios",
        "max_len",    "out"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error(Errc::InvalidConfig,
                        "unknown config key '" + key + "'");
        }
    }

    TrainRun run;
    TrainConfig& cfg = run.config;
    ModelConfig& model = cfg.model;

    model.topology = topology_from(
        ov.topology.value_or(j.value("topology", std::string("ptn"))));
    model.sharing = sharing_from(
        ov.sharing.value_or(j.value("sharing", std::string("hierarchical"))));
    model.mode =
        mode_from(ov.mode.value_or(j.value("mode", std::string("discard"))));
    model.family = family_from(j.value("family", std::string("sim14")));
    model.q = j.value("q", 1);
    model.qprime = j.value("qprime", 1);
    model.depth = j.value("depth", 1);
    cfg.learning_rate = j.value("learning_rate", 0.01);
    cfg.weight_decay = j.value("weight_decay", 1e-4);
    cfg.batch_size = j.value("batch_size", 16);
    cfg.max_epochs = j.value("max_epochs", 50);
    cfg.early_stop_patience = j.value("early_stop_patience", 5);
    cfg.k_folds = j.value("k_folds", 0);
    cfg.seed = ov.seed.value_or(j.value("seed", std::uint64_t{42}));
    cfg.init = init_from(j.value("init", std::string("uniform")));

    if (model.q < 1 || model.depth < 1 || cfg.learning_rate <= 0 ||
        cfg.weight_decay < 0 || cfg.batch_size < 1 || cfg.max_epochs < 1 ||
        cfg.early_stop_patience < 1) {
        throw Error(Errc::InvalidConfig,
                    "config: q, depth, learning_rate, batch_size, "
                    "max_epochs and early_stop_patience must be positive");
    }
    if (model.qprime != 1) {
        throw Error(Errc::InvalidConfig,
                    "config: qprime is fixed to 1 for binary tasks");
    }

    if (j.contains("split_ratios")) {
        const auto r = j["split_ratios"].get<std::vector<double>>();
        if (r.size() != 3) {
            throw Error(Errc::InvalidConfig,
                        "config: split_ratios needs 3 entries");
        }
        run.ratios = {r[0], r[1], r[2]};
    }

    run.out_dir = ov.out.value_or(j.value("out", std::string()));
    if (run.out_dir.empty()) {
        throw Error(Errc::InvalidConfig,
                    "config: output directory missing (key 'out' or --out)");
    }

    if (j.contains("synthetic") == j.contains("dataset")) {
        throw Error(Errc::InvalidConfig,
                    "config: exactly one of 'dataset' or 'synthetic' needed");
    }
    if (j.contains("synthetic")) {
        const json s = j["synthetic"];
        for (const auto& [key, value] : s.items()) {
            if (key != "n_samples" && key != "seq_len" &&
                key != "vocab_size" && key != "motif") {
                throw Error(Errc::InvalidConfig,
                            "unknown synthetic key '" + key + "'");
            }
        }
        const int n = s.value("n_samples", 1000);
        const int seq_len = s.value("seq_len", 8);
        const int vocab_size = s.value("vocab_size", 4);
        const auto motif = s.value("motif", std::vector<int>{0, 1});
        if (motif.size() != 2) {
            throw Error(Errc::InvalidConfig,
                        "config: synthetic.motif needs 2 token ids");
        }
        cfg.vocab = Vocabulary::synthetic(vocab_size);
        run.records = synth_motif_dataset(n, seq_len, vocab_size,
                                          {motif[0], motif[1]},
                                          derive_seed(cfg.seed, 5));
        model.max_len = seq_len;
    } else {
        const std::string dataset = j["dataset"].get<std::string>();
        if (!fs::exists(dataset)) {
            throw Error(Errc::InvalidConfig,
                        "dataset file not found: " + dataset);
        }
        cfg.vocab = Vocabulary::amino();
        std::ifstream in(dataset);
        run.records = read_dataset(in);
        int longest = 0;
        for (const auto& r : run.records) {
            longest = std::max(longest, static_cast<int>(r.sequence.size()));
        }
        model.max_len = j.value("max_len", longest);
    }
    model.vocab_size = cfg.vocab.size();
    model.pad_token = cfg.vocab.pad_id;
    return run;
}

int cmd_train(const std::string& config_path, const Overrides& ov,
              const std::string& resume, std::ostream& out,
              std::ostream& err) {
    TrainRun run = read_train_config(config_path, ov);
    TrainConfig& cfg = run.config;

    std::optional<Checkpoint> warm;
    if (!resume.empty()) {
        warm = load_checkpoint_file(resume);
        cfg.model = warm->model;
        cfg.vocab = warm->vocab;
    }

    const DatasetSplits splits =
        split(run.records, run.ratios, derive_seed(cfg.seed, 3));
    const auto train_samples = to_samples(splits.train, cfg.vocab);
    const auto val_samples = to_samples(splits.validation, cfg.vocab);
    const auto test_samples = to_samples(splits.test, cfg.vocab);

    out << "training " << to_string(cfg.model.sharing) << " "
        << to_string(cfg.model.topology) << " (" << to_string(cfg.model.mode)
        << ", q=" << cfg.model.q << ", depth=" << cfg.model.depth << ") on "
        << train_samples.size() << "/" << val_samples.size() << "/"
        << test_samples.size() << " samples\n";

    const EpochCallback log_epoch = [&out](const EpochRow& r) {
        out << "epoch " << r.epoch << " train_loss=" << r.train_loss
            << " train_acc=" << r.train_acc << " val_loss=" << r.val_loss
            << " val_acc=" << r.val_acc << "\n";
    };
    const TrainResult result =
        train(cfg, train_samples, val_samples,
              warm ? &warm->store : nullptr, log_epoch);

    fs::create_directories(run.out_dir);
    const fs::path out_dir(run.out_dir);
    save_checkpoint_file((out_dir / "checkpoint.txt").string(),
                         {cfg.model, cfg.vocab, result.store});
    write_text_file(out_dir / "history.csv", history_csv(result.history));
    const Metrics test = evaluate(result.store, cfg.model, test_samples);
    write_text_file(out_dir / "metrics.json", metrics_json(test));

    if (cfg.k_folds >= 2) {
        std::vector<Sample> pool = train_samples;
        pool.insert(pool.end(), val_samples.begin(), val_samples.end());
        const KFoldResult kf = kfold(cfg, pool);
        json j;
        j["mean_accuracy"] = kf.mean_accuracy;
        j["std_accuracy"] = kf.std_accuracy;
        j["mean_f1"] = kf.mean_f1;
        j["std_f1"] = kf.std_f1;
        j["folds"] = json::array();
        for (const Metrics& m : kf.folds) {
            j["folds"].push_back(json::parse(metrics_json(m)));
        }
        write_text_file(out_dir / "kfold.json", j.dump(2) + "\n");
    }

    out << "best epoch " << result.history.best_epoch << " ("
        << (result.history.reason == StopReason::EarlyStop ? "early stop"
                                                           : "max epochs")
        << "); test accuracy " << test.accuracy << ", f1 " << test.f1 << "\n";
    return 0;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const std::string& checkpoint, const std::string& sequence,
                 std::ostream& out, std::ostream& err) {
    if (sequence.empty()) {
        err << "error: --sequence must not be empty\n";
        return 2;
    }
    const Checkpoint ckpt = load_checkpoint_file(checkpoint);
    std::vector<int> tokens;
    for (char c : sequence) {
        const int id = ckpt.vocab.id_of(c);
        if (id >= 0) {
            tokens.push_back(id);
        } else if (ckpt.vocab.unk_id >= 0) {
            tokens.push_back(ckpt.vocab.unk_id);
        } else {
            err << "error: letter '" << c
                << "' is not in the model alphabet " << ckpt.vocab.letters
                << "\n";
            return 2;
        }
    }
    const Outcome o = predict(ckpt.store, ckpt.model, tokens);
    json j;
    j["p0"] = o.p0;
    j["p1"] = o.p1;
    j["raw_weight"] = o.raw_weight;
    j["predicted"] = o.predicted();
    out << j.dump() << "\n";
    return 0;
}

// ----------------------------------------------------------------- export

int cmd_export(const std::string& checkpoint, const std::string& what,
               const std::string& sequence, const std::string& box,
               std::ostream& out, std::ostream& err) {
    if (what != "diagram" && what != "circuit") {
        err << "error: invalid --what '" << what
            << "' (valid: diagram, circuit)\n";
        return 2;
    }
    const Checkpoint ckpt = load_checkpoint_file(checkpoint);

    if (what == "circuit" && !box.empty()) {
        const ParamKey key = ParamKey::parse(box);
        BoxRole role = BoxRole::Word;
        switch (key.kind) {
        case ParamKey::Kind::Word:
            role = BoxRole::Word;
            break;
        case ParamKey::Kind::Merge:
            role = BoxRole::Merge;
            break;
        case ParamKey::Kind::Filter:
            role = BoxRole::Filter;
            break;
        case ParamKey::Kind::Classifier:
            role = BoxRole::Classifier;
            break;
        }
        const GateSequence seq = build_circuit(
            ckpt.model.family_of(role), box_width(role, ckpt.model.q),
            ckpt.model.depth_of(role));
        out << export_circuit(seq, key);
        return 0;
    }

    if (sequence.empty()) {
        err << "error: --sequence required for " << what << " export\n";
        return 2;
    }
    std::vector<int> tokens;
    for (char c : sequence) {
        const int id = ckpt.vocab.id_of(c);
        tokens.push_back(id >= 0 ? id : ckpt.vocab.unk_id);
    }
    if (what == "diagram") {
        const SchemeDiagram d = ckpt.model.topology == Topology::Path
                                    ? build_ptn(tokens)
                                    : build_ctn(tokens, ckpt.model.pad_token);
        out << export_diagram(d);
    } else {
        out << export_plan(plan_for(tokens, ckpt.model));
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"qtnseq - quantum tensor network sequence classifier"};
    app.require_subcommand(1);

    PrepareArgs prep;
    CLI::App* prepare = app.add_subcommand(
        "prepare", "filter + label a FASTA corpus into a dataset");
    prepare->add_option("--fasta", prep.fasta, "FASTA input")->required();
    prepare->add_option("--labels", prep.labels,
                        "two-column TSV: accession, location");
    prepare->get_option("--labels")->required();
    prepare->add_option("--out", prep.out, "output directory")->required();
    prepare->add_option("--min-len", prep.min_len, "minimum length kept");
    prepare->add_option("--max-len", prep.max_len, "maximum length kept");
    prepare->add_option("--ratios", prep.ratios,
                        "train/validation/test ratios")
        ->expected(3);
    prepare->add_option("--seed", prep.seed, "split seed");

    std::string config_path;
    std::string resume;
    Overrides ov;
    std::string ov_mode;
    std::string ov_topology;
    std::string ov_sharing;
    std::string ov_out;
    std::uint64_t ov_seed = 0;
    CLI::App* train_cmd =
        app.add_subcommand("train", "train a model from a config file");
    train_cmd->add_option("--config", config_path, "JSON config")->required();
    train_cmd->add_option("--resume", resume,
                          "checkpoint to continue from");
    CLI::Option* seed_opt =
        train_cmd->add_option("--seed", ov_seed, "override config seed");
    train_cmd->add_option("--mode", ov_mode, "postselect|discard");
    train_cmd->add_option("--topology", ov_topology, "ptn|ctn");
    train_cmd->add_option("--sharing", ov_sharing, "uniform|hierarchical");
    train_cmd->add_option("--out", ov_out, "override output directory");

    std::string sim_checkpoint;
    std::string sim_sequence;
    CLI::App* simulate =
        app.add_subcommand("simulate", "classify one sequence");
    simulate->add_option("--checkpoint", sim_checkpoint, "trained model")
        ->required();
    simulate->add_option("--sequence", sim_sequence, "symbol sequence")
        ->required();

    std::string exp_checkpoint;
    std::string exp_what;
    std::string exp_sequence;
    std::string exp_box;
    CLI::App* exportc =
        app.add_subcommand("export", "dump a diagram or circuit listing");
    exportc->add_option("--checkpoint", exp_checkpoint, "trained model")
        ->required();
    exportc->add_option("--what", exp_what, "diagram|circuit")->required();
    exportc->add_option("--sequence", exp_sequence, "symbol sequence");
    exportc->add_option("--box", exp_box,
                        "parameter key of a single box (circuit export)");

    std::vector<const char*> argv;
    argv.push_back("qtnseq");
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (prepare->parsed()) {
            return cmd_prepare(prep, out, err);
        }
        if (train_cmd->parsed()) {
            if (seed_opt->count() > 0) {
                ov.seed = ov_seed;
            }
            if (!ov_mode.empty()) {
                ov.mode = ov_mode;
            }
            if (!ov_topology.empty()) {
                ov.topology = ov_topology;
            }
            if (!ov_sharing.empty()) {
                ov.sharing = ov_sharing;
            }
            if (!ov_out.empty()) {
                ov.out = ov_out;
            }
            return cmd_train(config_path, ov, resume, out, err);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_checkpoint, sim_sequence, out, err);
        }
        if (exportc->parsed()) {
            return cmd_export(exp_checkpoint, exp_what, exp_sequence, exp_box,
                              out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run_cli(const std::vector<std::string>& args) {
    return run_cli(args, std::cout, std::cerr);
}

} // namespace qtn
