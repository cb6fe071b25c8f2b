#pragma once

#include <string>

#include "lrm/backbone.hpp"
#include "lrm/meta_training.hpp"
#include "lrm/subspace.hpp"

namespace lrm {

// Everything a training run needs: backbone shape, subspace rank and init,
// and the meta-learning schedule. Serialized as flat key = value text with
// keys named exactly after the fields.
struct ExperimentConfig {
    BackboneConfig backbone;
    size_t k = 2;
    SubspaceInit init_mode = SubspaceInit::ortho;
    TrainConfig train;

    std::string to_text() const;
};

// Parses key = value lines ('#' starts a comment; blank lines ignored).
// Unknown keys are errors so typos do not silently fall back to defaults.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

}  // namespace lrm
