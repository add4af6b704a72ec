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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtnseq/data.hpp"
#include "qtnseq/engine.hpp"
#include "qtnseq/grad.hpp"

namespace qtn {

struct TrainConfig {
    ModelConfig model;
    Vocabulary vocab;
    double learning_rate = 0.01;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batch_size = 16;
    int max_epochs = 50;
    int early_stop_patience = 5;
    int k_folds = 5;
    std::uint64_t seed = 0;
    InitScheme init = InitScheme::UniformAngle;
};

struct Sample {
    std::string id;
    std::vector<int> tokens;
    int label = 0;
};

std::vector<Sample> to_samples(std::span<const SequenceRecord> records,
                               const Vocabulary& vocab);

struct Metrics {
    double accuracy = 0.0;
    double f1 = 0.0;
    double bce_loss = 0.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;
    bool f1_defined = true; // false when 2tp+fp+fn == 0 (f1 reported as 0)
};

struct EpochRow {
    int epoch;
    double train_loss;
    double train_acc;
    double val_loss;
    double val_acc;
};

enum class StopReason { EarlyStop, MaxEpochs };

struct TrainHistory {
    std::vector<EpochRow> rows;
    int best_epoch = 0;
    StopReason reason = StopReason::MaxEpochs;
};

struct TrainResult {
    ParamStore store; // snapshot at best validation accuracy
    TrainHistory history;
};

/// Diagram + plan for one token sequence under the config's topology.
/// Hierarchical stores are length-bound: path models reject N > max_len and
/// convolutional ones reject trees deeper than trained (SequenceTooLong).
CircuitPlan plan_for(std::span<const int> tokens, const ModelConfig& config);

Outcome predict(const ParamStore& store, const ModelConfig& config,
                std::span<const int> tokens);

/// AdamW with decoupled weight decay.
struct AdamWState {
    std::map<ParamKey, Eigen::VectorXd> m;
    std::map<ParamKey, Eigen::VectorXd> v;
    long t = 0;
};

void adamw_step(ParamStore& store, AdamWState& state, const Gradient& grad,
                const TrainConfig& config);

using EpochCallback = std::function<void(const EpochRow&)>;

/// Mini-batch AdamW on mean BCE with early stopping on validation accuracy.
/// Fully deterministic under config.seed (init, shuffling, reduction
/// order). Returns the parameter snapshot at the best validation accuracy.
TrainResult train(const TrainConfig& config, const std::vector<Sample>& train,
                  const std::vector<Sample>& validation,
                  const ParamStore* warm_start = nullptr,
                  const EpochCallback& on_epoch = {});

Metrics evaluate(const ParamStore& store, const ModelConfig& config,
                 const std::vector<Sample>& samples);

struct KFoldResult {
    std::vector<Metrics> folds;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    double mean_f1 = 0.0;
    double std_f1 = 0.0;
};

/// Seeded fold assignment: a shuffled partition into k contiguous chunks,
/// the first (n mod k) of them one sample larger.
std::vector<std::vector<std::size_t>> fold_indices(std::size_t n, int k,
                                                   std::uint64_t seed);

/// Deterministic fold assignment; every sample validates exactly once.
KFoldResult kfold(const TrainConfig& config, const std::vector<Sample>& data);

std::string history_csv(const TrainHistory& history);
std::string metrics_json(const Metrics& metrics);

} // namespace qtn
