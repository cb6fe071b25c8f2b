#include "lrm/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lrm/csv.hpp"

namespace lrm {

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "# model\n";
    out << "hidden_width = " << backbone.hidden_width << "\n";
    out << "hidden_layers = " << backbone.hidden_layers << "\n";
    out << "omega0 = " << fmt_double(backbone.omega0) << "\n";
    out << "modulation_dim = " << backbone.modulation_dim << "\n";
    out << "k = " << k << "\n";
    out << "init_mode = " << to_string(init_mode) << "\n";
    out << "# training\n";
    out << "inner_steps = " << train.inner_steps << "\n";
    out << "inner_lr = " << fmt_double(train.inner_lr) << "\n";
    out << "outer_lr = " << fmt_double(train.outer_lr) << "\n";
    out << "outer_iters = " << train.outer_iters << "\n";
    out << "batch_videos = " << train.batch_videos << "\n";
    out << "coord_subsample = " << train.coord_subsample << "\n";
    out << "lambda_ortho = " << fmt_double(train.lambda_ortho) << "\n";
    out << "meta_order = " << to_string(train.meta_order) << "\n";
    out << "seed = " << train.seed << "\n";
    out << "share_coords = " << (train.share_coords ? 1 : 0) << "\n";
    out << "checkpoint_every = " << train.checkpoint_every << "\n";
    return out.str();
}

namespace {
std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}
}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "hidden_width") cfg.backbone.hidden_width = std::stoul(value);
            else if (key == "hidden_layers") cfg.backbone.hidden_layers = std::stoul(value);
            else if (key == "omega0") cfg.backbone.omega0 = std::stod(value);
            else if (key == "modulation_dim") cfg.backbone.modulation_dim = std::stoul(value);
            else if (key == "k") cfg.k = std::stoul(value);
            else if (key == "init_mode") cfg.init_mode = subspace_init_from_string(value);
            else if (key == "inner_steps") cfg.train.inner_steps = std::stoul(value);
            else if (key == "inner_lr") cfg.train.inner_lr = std::stod(value);
            else if (key == "outer_lr") cfg.train.outer_lr = std::stod(value);
            else if (key == "outer_iters") cfg.train.outer_iters = std::stoul(value);
            else if (key == "batch_videos") cfg.train.batch_videos = std::stoul(value);
            else if (key == "coord_subsample") cfg.train.coord_subsample = std::stoul(value);
            else if (key == "lambda_ortho") cfg.train.lambda_ortho = std::stod(value);
            else if (key == "meta_order") cfg.train.meta_order = meta_order_from_string(value);
            else if (key == "seed") cfg.train.seed = std::stoull(value);
            else if (key == "share_coords") cfg.train.share_coords = std::stoul(value) != 0;
            else if (key == "checkpoint_every") cfg.train.checkpoint_every = std::stoul(value);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
    write_text_file(path, cfg.to_text());
}

}  // namespace lrm
