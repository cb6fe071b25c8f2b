#include "lrm/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrm/csv.hpp"
#include "lrm/rng.hpp"

namespace lrm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kForeground = 0.9;
constexpr double kBackground = 0.1;
constexpr double kEdgeRamp = 1.5;  // pixels of soft edge

// Continuous frame positions where sin(2*pi*t/P + phase) hits `target_phase`
// (pi/2 for ED, 3*pi/2 for ES), rounded to the nearest frame within [0, T).
std::vector<size_t> extremum_frames(const PhantomConfig& cfg, double target_phase) {
    std::vector<size_t> frames;
    const double P = cfg.period;
    // 2*pi*t/P + phase = target_phase + 2*pi*n
    double t0 = (target_phase - cfg.phase) * P / kTwoPi;
    const long n_lo = static_cast<long>(std::floor((-0.5 - t0) / P)) - 1;
    const long n_hi = static_cast<long>(std::ceil((static_cast<double>(cfg.frames) - t0) / P)) + 1;
    for (long n = n_lo; n <= n_hi; ++n) {
        const double t = t0 + static_cast<double>(n) * P;
        const long rounded = std::lround(t);
        if (rounded >= 0 && rounded < static_cast<long>(cfg.frames))
            frames.push_back(static_cast<size_t>(rounded));
    }
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    return frames;
}
}  // namespace

void PhantomConfig::validate() const {
    if (frames < 1 || height < 1 || width < 1)
        throw std::invalid_argument("PhantomConfig: empty dimensions");
    if (!(period > 2.0)) throw std::invalid_argument("PhantomConfig: period must be > 2");
    if (!(amplitude >= 0.0) || (amplitude > 0.0 && amplitude >= base_radius))
        throw std::invalid_argument("PhantomConfig: need 0 < A < r0 (or A = 0)");
    if (!(base_radius + amplitude < 0.5))
        throw std::invalid_argument("PhantomConfig: r0 + A must be < 0.5");
    if (!(sigma >= 0.0)) throw std::invalid_argument("PhantomConfig: sigma must be >= 0");
}

PhantomVideo generate_phantom(const PhantomConfig& cfg) {
    cfg.validate();
    PhantomVideo out;
    out.video = VideoTensor(cfg.frames, cfg.height, cfg.width);
    if (cfg.amplitude > 0.0) {
        out.ed_frames = extremum_frames(cfg, kTwoPi / 4.0);      // sin = +1
        out.es_frames = extremum_frames(cfg, 3.0 * kTwoPi / 4.0);  // sin = -1
    }

    Rng rng(cfg.seed);
    const double drift_angle = rng.uniform(0.0, kTwoPi);
    const double dx = cfg.drift * std::cos(drift_angle);
    const double dy = cfg.drift * std::sin(drift_angle);
    const double scale = static_cast<double>(std::min(cfg.height, cfg.width));
    const double cx0 = static_cast<double>(cfg.width) / 2.0;
    const double cy0 = static_cast<double>(cfg.height) / 2.0;

    for (size_t t = 0; t < cfg.frames; ++t) {
        const double r = (cfg.base_radius +
                          cfg.amplitude * std::sin(kTwoPi * static_cast<double>(t) / cfg.period + cfg.phase)) *
                         scale;
        const double cx = cx0 + dx * static_cast<double>(t);
        const double cy = cy0 + dy * static_cast<double>(t);
        double* frame = out.video.frame(t);
        for (size_t i = 0; i < cfg.height; ++i) {
            const double py = static_cast<double>(i) + 0.5;
            for (size_t j = 0; j < cfg.width; ++j) {
                const double px = static_cast<double>(j) + 0.5;
                const double d = std::sqrt((px - cx) * (px - cx) + (py - cy) * (py - cy));
                const double edge = std::clamp((r - d) / kEdgeRamp + 0.5, 0.0, 1.0);
                double value = kBackground + (kForeground - kBackground) * edge;
                if (cfg.sigma > 0.0) value *= 1.0 + cfg.sigma * rng.uniform(-1.0, 1.0);
                frame[i * cfg.width + j] = std::clamp(value, 0.0, 1.0);
            }
        }
    }
    return out;
}

void write_manifest(const std::string& path, const std::vector<PhantomRecord>& records) {
    std::string body = "path,frames,height,width,period,phase,drift,sigma,seed,ed,es\n";
    for (const auto& rec : records) {
        body += rec.path + "," + std::to_string(rec.cfg.frames) + "," + std::to_string(rec.cfg.height) +
                "," + std::to_string(rec.cfg.width) + "," + fmt_double(rec.cfg.period) + "," +
                fmt_double(rec.cfg.phase) + "," + fmt_double(rec.cfg.drift) + "," +
                fmt_double(rec.cfg.sigma) + "," + std::to_string(rec.cfg.seed) + ",";
        for (size_t i = 0; i < rec.ed_frames.size(); ++i)
            body += (i ? ";" : "") + std::to_string(rec.ed_frames[i]);
        body += ",";
        for (size_t i = 0; i < rec.es_frames.size(); ++i)
            body += (i ? ";" : "") + std::to_string(rec.es_frames[i]);
        body += "\n";
    }
    write_text_file(path, body);
}

std::vector<PhantomRecord> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open manifest");
    std::vector<PhantomRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;  // header
        }
        const auto cols = split(line, ',');
        if (cols.size() != 11) throw std::runtime_error(path + ": malformed manifest row: " + line);
        PhantomRecord rec;
        rec.path = cols[0];
        rec.cfg.frames = std::stoul(cols[1]);
        rec.cfg.height = std::stoul(cols[2]);
        rec.cfg.width = std::stoul(cols[3]);
        rec.cfg.period = std::stod(cols[4]);
        rec.cfg.phase = std::stod(cols[5]);
        rec.cfg.drift = std::stod(cols[6]);
        rec.cfg.sigma = std::stod(cols[7]);
        rec.cfg.seed = std::stoull(cols[8]);
        for (const auto& tok : split(cols[9], ';'))
            if (!tok.empty()) rec.ed_frames.push_back(std::stoul(tok));
        for (const auto& tok : split(cols[10], ';'))
            if (!tok.empty()) rec.es_frames.push_back(std::stoul(tok));
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PhantomConfig> sample_suite_configs(const SuiteConfig& suite) {
    std::vector<PhantomConfig> configs;
    Rng rng(suite.seed);
    for (size_t i = 0; i < suite.n_videos; ++i) {
        PhantomConfig cfg;
        cfg.frames = suite.frames;
        cfg.height = suite.height;
        cfg.width = suite.width;
        cfg.sigma = suite.sigma;
        cfg.seed = Rng::mix(suite.seed, i + 1);
        cfg.period = rng.uniform(suite.period_min, suite.period_max);
        cfg.drift = rng.uniform(0.0, suite.drift_max);
        cfg.base_radius = rng.uniform(0.22, 0.3);
        cfg.amplitude = rng.uniform(0.08, 0.13);

        // Resample the phase until every labeled extremum is at least
        // `margin` frames away from both temporal boundaries.
        const double T = static_cast<double>(suite.frames);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            cfg.phase = rng.uniform(0.0, kTwoPi);
            bool ok = true;
            for (double target : {kTwoPi / 4.0, 3.0 * kTwoPi / 4.0}) {
                double t0 = (target - cfg.phase) * cfg.period / kTwoPi;
                t0 -= std::floor(t0 / cfg.period) * cfg.period;  // first extremum >= 0
                for (double t = t0 - cfg.period; t < T; t += cfg.period) {
                    if (t > -0.5 && (t < suite.margin || t > T - 1.0 - suite.margin)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) break;
            if (attempt == 999)
                throw std::runtime_error("sample_suite_configs: no feasible phase found");
        }
        configs.push_back(cfg);
    }
    return configs;
}

double estimate_disk_radius(const double* frame, size_t height, size_t width) {
    const double threshold = 0.5 * (kForeground + kBackground);
    size_t count = 0;
    for (size_t i = 0; i < height * width; ++i)
        if (frame[i] > threshold) ++count;
    return std::sqrt(static_cast<double>(count) / 3.14159265358979323846);
}

}  // namespace lrm
