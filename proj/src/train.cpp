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

#include "qtnseq/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qtnseq/error.hpp"
#include "qtnseq/rng.hpp"

namespace qtn {

std::vector<Sample> to_samples(std::span<const SequenceRecord> records,
                               const Vocabulary& vocab) {
    std::vector<Sample> out;
    out.reserve(records.size());
    for (const SequenceRecord& r : records) {
        out.push_back({r.id, tokenize(r.sequence, vocab), r.label});
    }
    return out;
}

CircuitPlan plan_for(std::span<const int> tokens, const ModelConfig& config) {
    if (config.sharing == Sharing::Hierarchical && config.max_len > 0) {
        const int n = static_cast<int>(tokens.size());
        if (config.topology == Topology::Path && n > config.max_len) {
            throw Error(Errc::SequenceTooLong,
                        "sequence length " + std::to_string(n) +
                            " exceeds the position-keyed model's bound of " +
                            std::to_string(config.max_len));
        }
        if (config.topology == Topology::Convolutional &&
            next_pow2(n) > next_pow2(config.max_len)) {
            throw Error(Errc::SequenceTooLong,
                        "padded length " + std::to_string(next_pow2(n)) +
                            " exceeds the layer-keyed model's tree of " +
                            std::to_string(next_pow2(config.max_len)));
        }
    }
    const SchemeDiagram d = config.topology == Topology::Path
                                ? build_ptn(tokens)
                                : build_ctn(tokens, config.pad_token);
    return plan(d, config);
}

Outcome predict(const ParamStore& store, const ModelConfig& config,
                std::span<const int> tokens) {
    return eval(plan_for(tokens, config), store, config.mode);
}

void adamw_step(ParamStore& store, AdamWState& state, const Gradient& grad,
                const TrainConfig& config) {
    ++state.t;
    const double bc1 = 1.0 - std::pow(config.beta1, state.t);
    const double bc2 = 1.0 - std::pow(config.beta2, state.t);
    for (auto& [key, theta] : store.entries) {
        const Eigen::VectorXd& g = grad.by_key.at(key);
        auto [mit, inserted_m] =
            state.m.try_emplace(key, Eigen::VectorXd::Zero(theta.size()));
        auto [vit, inserted_v] =
            state.v.try_emplace(key, Eigen::VectorXd::Zero(theta.size()));
        Eigen::VectorXd& m = mit->second;
        Eigen::VectorXd& v = vit->second;
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
        const Eigen::VectorXd mhat = m / bc1;
        const Eigen::VectorXd denom =
            (v / bc2).cwiseSqrt() +
            Eigen::VectorXd::Constant(theta.size(), config.epsilon);
        theta -= config.learning_rate *
                 (mhat.cwiseQuotient(denom) + config.weight_decay * theta);
    }
}

namespace {

Metrics metrics_from(const std::vector<int>& predictions,
                     const std::vector<int>& labels, double mean_loss) {
    Metrics m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (labels[i] == 1) {
            (predictions[i] == 1 ? m.tp : m.fn) += 1;
        } else {
            (predictions[i] == 1 ? m.fp : m.tn) += 1;
        }
    }
    const long total = m.tp + m.fp + m.fn + m.tn;
    m.accuracy = total > 0
                     ? static_cast<double>(m.tp + m.tn) /
                           static_cast<double>(total)
                     : 0.0;
    const long f1_den = 2 * m.tp + m.fp + m.fn;
    if (f1_den == 0) {
        m.f1 = 0.0;
        m.f1_defined = false;
    } else {
        m.f1 = 2.0 * static_cast<double>(m.tp) / static_cast<double>(f1_den);
    }
    m.bce_loss = mean_loss;
    return m;
}

} // namespace

Metrics evaluate(const ParamStore& store, const ModelConfig& config,
                 const std::vector<Sample>& samples) {
    std::vector<int> predictions;
    std::vector<int> labels;
    double loss = 0.0;
    for (const Sample& s : samples) {
        const Outcome out = predict(store, config, s.tokens);
        predictions.push_back(out.predicted());
        labels.push_back(s.label);
        loss += bce_loss(out, s.label);
    }
    return metrics_from(predictions, labels,
                        samples.empty() ? 0.0 : loss / samples.size());
}

TrainResult train(const TrainConfig& config, const std::vector<Sample>& train,
                  const std::vector<Sample>& validation,
                  const ParamStore* warm_start,
                  const EpochCallback& on_epoch) {
    if (train.empty() || validation.empty()) {
        throw Error(Errc::EmptySplit, "train: empty train or validation split");
    }

    ParamStore store =
        warm_start ? *warm_start
                   : init_params(schema_for(config.model),
                                 config.model.sharing, config.seed,
                                 config.init);

    // plans depend only on the token sequence; build once
    std::vector<CircuitPlan> plans;
    plans.reserve(train.size());
    for (const Sample& s : train) {
        plans.push_back(plan_for(s.tokens, config.model));
    }

    AdamWState adam;
    Rng shuffle_rng(derive_seed(config.seed, 17));
    TrainHistory history;
    ParamStore best_store = store;
    double best_acc = -1.0;
    int stale = 0;

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        long epoch_correct = 0;
        for (std::size_t start = 0; start < order.size();
             start += config.batch_size) {
            const std::size_t stop =
                std::min(order.size(), start + config.batch_size);
            Gradient batch = zeros_like(store);
            for (std::size_t k = start; k < stop; ++k) {
                const Sample& s = train[order[k]];
                const CircuitPlan& p = plans[order[k]];
                const Outcome out = eval(p, store, config.model.mode);
                epoch_correct += out.predicted() == s.label;
                batch.add_scaled(
                    grad_adjoint(p, store, s.label, config.model.mode),
                    1.0 / static_cast<double>(stop - start));
            }
            epoch_loss += batch.loss * static_cast<double>(stop - start);
            adamw_step(store, adam, batch, config);
        }

        const Metrics val = evaluate(store, config.model, validation);
        history.rows.push_back(
            {epoch, epoch_loss / static_cast<double>(train.size()),
             static_cast<double>(epoch_correct) /
                 static_cast<double>(train.size()),
             val.bce_loss, val.accuracy});
        if (on_epoch) {
            on_epoch(history.rows.back());
        }

        if (val.accuracy > best_acc) {
            best_acc = val.accuracy;
            best_store = store;
            history.best_epoch = epoch;
            stale = 0;
        } else {
            ++stale;
            if (stale >= config.early_stop_patience) {
                history.reason = StopReason::EarlyStop;
                return {std::move(best_store), std::move(history)};
            }
        }
    }
    history.reason = StopReason::MaxEpochs;
    return {std::move(best_store), std::move(history)};
}

std::vector<std::vector<std::size_t>> fold_indices(std::size_t n, int k,
                                                   std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t cursor = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < extra);
        folds[f].assign(order.begin() + cursor, order.begin() + cursor + size);
        cursor += size;
    }
    return folds;
}

KFoldResult kfold(const TrainConfig& config, const std::vector<Sample>& data) {
    const int k = config.k_folds;
    if (k < 2 || k > static_cast<int>(data.size())) {
        throw Error(Errc::InvalidFoldCount,
                    "kfold: need 2 <= k <= n, got k=" + std::to_string(k) +
                        " n=" + std::to_string(data.size()));
    }
    const auto folds =
        fold_indices(data.size(), k, derive_seed(config.seed, 99));

    KFoldResult result;
    for (int f = 0; f < k; ++f) {
        std::vector<Sample> val;
        std::vector<Sample> rest;
        for (int g = 0; g < k; ++g) {
            for (std::size_t idx : folds[g]) {
                (g == f ? val : rest).push_back(data[idx]);
            }
        }
        TrainConfig fold_config = config;
        fold_config.seed = derive_seed(config.seed, 1000 + f);
        const TrainResult r = train(fold_config, rest, val);
        result.folds.push_back(evaluate(r.store, config.model, val));
    }

    auto mean_of = [&](auto proj) {
        double acc = 0.0;
        for (const Metrics& m : result.folds) {
            acc += proj(m);
        }
        return acc / static_cast<double>(result.folds.size());
    };
    auto std_of = [&](auto proj, double mean) {
        double acc = 0.0;
        for (const Metrics& m : result.folds) {
            const double d = proj(m) - mean;
            acc += d * d;
        }
        return std::sqrt(acc / static_cast<double>(result.folds.size()));
    };
    result.mean_accuracy = mean_of([](const Metrics& m) { return m.accuracy; });
    result.std_accuracy =
        std_of([](const Metrics& m) { return m.accuracy; },
               result.mean_accuracy);
    result.mean_f1 = mean_of([](const Metrics& m) { return m.f1; });
    result.std_f1 =
        std_of([](const Metrics& m) { return m.f1; }, result.mean_f1);
    return result;
}

namespace {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::string history_csv(const TrainHistory& history) {
    std::ostringstream os;
    os << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (const EpochRow& r : history.rows) {
        os << r.epoch << ',' << format_double(r.train_loss) << ','
           << format_double(r.train_acc) << ',' << format_double(r.val_loss)
           << ',' << format_double(r.val_acc) << '\n';
    }
    return os.str();
}

std::string metrics_json(const Metrics& m) {
    nlohmann::json j;
    j["accuracy"] = m.accuracy;
    j["f1"] = m.f1;
    j["f1_defined"] = m.f1_defined;
    j["bce_loss"] = m.bce_loss;
    j["confusion"] = {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
    return j.dump(2) + "\n";
}

} // namespace qtn
