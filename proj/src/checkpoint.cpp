#include "lrm/checkpoint.hpp"

#include "lrm/io_common.hpp"

namespace lrm {

namespace {
constexpr char kCkptMagic[4] = {'L', 'R', 'M', 'C'};
constexpr char kLatMagic[4] = {'L', 'R', 'M', 'L'};
constexpr uint32_t kCkptVersion = 1;
}  // namespace

Model make_model(const BackboneConfig& cfg, size_t k, SubspaceInit init_mode, uint64_t seed) {
    cfg.validate();
    Model model;
    model.cfg = cfg;
    model.k = k;
    model.init_mode = init_mode;
    model.layout = make_param_layout(cfg, k);
    add_param_slices(model.store, cfg, k);

    Rng rng(seed);
    init_backbone_params(model.store, cfg, rng);
    const Subspace sub = init_subspace(k, cfg.modulation_dim, init_mode, Rng::mix(seed, 0xb5));
    auto B = model.store.values("subspace.B");
    for (size_t i = 0; i < B.size(); ++i) B[i] = sub.B.data[i];
    return model;
}

void write_checkpoint(const std::string& path, const Model& model) {
    std::vector<uint8_t> out;
    bin::put_bytes(out, kCkptMagic, 4);
    bin::put_u32(out, kCkptVersion);
    bin::put_u32(out, static_cast<uint32_t>(model.cfg.hidden_width));
    bin::put_u32(out, static_cast<uint32_t>(model.cfg.hidden_layers));
    bin::put_u32(out, static_cast<uint32_t>(model.cfg.modulation_dim));
    bin::put_u32(out, static_cast<uint32_t>(model.cfg.in_dim));
    bin::put_u32(out, static_cast<uint32_t>(model.cfg.out_dim));
    bin::put_u32(out, static_cast<uint32_t>(model.k));
    bin::put_u32(out, model.init_mode == SubspaceInit::basic ? 0u : 1u);
    bin::put_f64(out, model.cfg.omega0);

    const auto& slices = model.store.slices();
    bin::put_u32(out, static_cast<uint32_t>(slices.size()));
    for (const auto& s : slices) {
        bin::put_u32(out, static_cast<uint32_t>(s.name.size()));
        bin::put_bytes(out, s.name.data(), s.name.size());
        bin::put_u64(out, s.offset);
        bin::put_u64(out, s.length);
    }
    for (double v : model.store.values()) bin::put_f64(out, v);
    bin::write_file(path, out);
}

Model read_checkpoint(const std::string& path) {
    bin::Reader r(bin::read_file(path), path);
    r.expect_magic(kCkptMagic, "LRMC");
    const uint32_t version = r.u32();
    if (version != kCkptVersion)
        throw IoError(IoError::Kind::bad_version,
                      path + ": unsupported LRMC version " + std::to_string(version));

    Model model;
    model.cfg.hidden_width = r.u32();
    model.cfg.hidden_layers = r.u32();
    model.cfg.modulation_dim = r.u32();
    model.cfg.in_dim = r.u32();
    model.cfg.out_dim = r.u32();
    model.k = r.u32();
    model.init_mode = r.u32() == 0 ? SubspaceInit::basic : SubspaceInit::ortho;
    model.cfg.omega0 = r.f64();
    model.cfg.validate();
    model.layout = make_param_layout(model.cfg, model.k);

    const uint32_t n_slices = r.u32();
    add_param_slices(model.store, model.cfg, model.k);
    if (n_slices != model.store.slices().size())
        throw IoError(IoError::Kind::malformed, path + ": slice manifest does not match config");
    for (uint32_t i = 0; i < n_slices; ++i) {
        const uint32_t name_len = r.u32();
        const std::string name = r.str(name_len);
        const uint64_t offset = r.u64();
        const uint64_t length = r.u64();
        const auto& expect = model.store.slices()[i];
        if (name != expect.name || offset != expect.offset || length != expect.length)
            throw IoError(IoError::Kind::malformed,
                          path + ": unexpected slice '" + name + "' in manifest");
    }
    for (double& v : model.store.values()) v = r.f64();
    return model;
}

void write_latents(const std::string& path, const LatentCodes& codes, size_t k) {
    if (codes.phi.cols != k)
        throw std::invalid_argument("write_latents: Phi column count does not match k");
    std::vector<uint8_t> out;
    bin::put_bytes(out, kLatMagic, 4);
    bin::put_u32(out, static_cast<uint32_t>(codes.v.size()));
    bin::put_u32(out, static_cast<uint32_t>(k));
    bin::put_u32(out, static_cast<uint32_t>(codes.phi.rows));
    for (double v : codes.v) bin::put_f64(out, v);
    for (double v : codes.phi.data) bin::put_f64(out, v);
    bin::write_file(path, out);
}

LatentCodes read_latents(const std::string& path) {
    bin::Reader r(bin::read_file(path), path);
    r.expect_magic(kLatMagic, "LRML");
    const uint32_t q = r.u32();
    const uint32_t k = r.u32();
    const uint32_t T = r.u32();
    LatentCodes codes;
    codes.v.resize(q);
    for (double& v : codes.v) v = r.f64();
    codes.phi = Matrix(T, k);
    for (double& v : codes.phi.data) v = r.f64();
    return codes;
}

}  // namespace lrm
