#include "cawcl/model.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace cawcl::model {

std::vector<Tensor2*> Model::encoder_params() { return {&enc.w1, &enc.b1, &enc.w2, &enc.b2}; }
std::vector<Tensor2*> Model::identity_params() { return {&id_cls.w, &id_cls.b}; }
std::vector<Tensor2*> Model::camera_params() { return {&cam_cls.w, &cam_cls.b}; }

std::vector<Tensor2*> Model::all_params() {
    return {&enc.w1, &enc.b1, &enc.w2, &enc.b2, &id_cls.w, &id_cls.b, &cam_cls.w, &cam_cls.b};
}

std::vector<std::string> Model::param_names() {
    return {"enc.w1", "enc.b1", "enc.w2", "enc.b2", "id.w", "id.b", "cam.w", "cam.b"};
}

namespace {

void fill_uniform(Tensor2& t, int fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : t.vec()) v = dist(rng);
}

} // namespace

Model init_model(int d_in, int d_h, int feat, int n_identities, int n_cameras,
                 double grl_scale, std::uint64_t seed) {
    if (d_in < 1 || d_h < 1 || feat < 1 || n_identities < 1 || n_cameras < 2)
        throw ShapeMismatch("init_model: invalid dimensions (need n_cameras >= 2)");
    Model m;
    m.enc.w1 = Tensor2(d_in, d_h);
    m.enc.b1 = Tensor2(1, d_h);
    m.enc.w2 = Tensor2(d_h, feat);
    m.enc.b2 = Tensor2(1, feat);
    m.id_cls.w = Tensor2(feat, n_identities);
    m.id_cls.b = Tensor2(1, n_identities);
    m.cam_cls.w = Tensor2(feat, n_cameras);
    m.cam_cls.b = Tensor2(1, n_cameras);
    m.cam_cls.grl_scale = grl_scale;

    std::mt19937_64 rng(seed);
    fill_uniform(m.enc.w1, d_in, rng);
    fill_uniform(m.enc.b1, d_in, rng);
    fill_uniform(m.enc.w2, d_h, rng);
    fill_uniform(m.enc.b2, d_h, rng);
    fill_uniform(m.id_cls.w, feat, rng);
    fill_uniform(m.id_cls.b, feat, rng);
    fill_uniform(m.cam_cls.w, feat, rng);
    fill_uniform(m.cam_cls.b, feat, rng);
    return m;
}

Tensor2 encode_frames(const Encoder& enc, const Tensor2& frames) {
    if (frames.cols() != enc.input_dim()) throw ShapeMismatch("encode_frames: frame dim != d_in");
    Tensor2 h = matmul(frames, enc.w1);
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < h.cols(); ++j) {
            double v = h.at(i, j) + enc.b1.at(0, j);
            h.at(i, j) = v > 0.0 ? v : std::expm1(v);
        }
    Tensor2 out = matmul(h, enc.w2);
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) out.at(i, j) += enc.b2.at(0, j);
    if (!out.all_finite()) throw NonFiniteLoss("encode_frames: non-finite encoding");
    return out;
}

std::vector<double> encode_frame(const Encoder& enc, std::span<const double> x) {
    if (static_cast<int>(x.size()) != enc.input_dim())
        throw ShapeMismatch("encode_frame: frame dim != d_in");
    Tensor2 one(1, enc.input_dim(), std::vector<double>(x.begin(), x.end()));
    Tensor2 e = encode_frames(enc, one);
    return {e.vec().begin(), e.vec().end()};
}

std::vector<double> aggregate(const Tensor2& encoded_frames) {
    if (encoded_frames.rows() < 1) throw EmptyTracklet("aggregate: no frames");
    std::vector<double> out(encoded_frames.cols());
    for (int j = 0; j < encoded_frames.cols(); ++j) {
        CompensatedSum acc;
        for (int i = 0; i < encoded_frames.rows(); ++i) acc.add(encoded_frames.at(i, j));
        out[static_cast<size_t>(j)] = acc.result() / encoded_frames.rows();
    }
    return out;
}

std::vector<double> grl_forward(std::span<const double> g) { return {g.begin(), g.end()}; }

std::vector<double> camera_probs(const CameraClassifier& cam, std::span<const double> g) {
    if (static_cast<int>(g.size()) != cam.w.rows())
        throw ShapeMismatch("camera_probs: feature dim mismatch");
    std::vector<double> scores(static_cast<size_t>(cam.num_cameras()));
    for (int j = 0; j < cam.num_cameras(); ++j) {
        CompensatedSum acc;
        for (int i = 0; i < cam.w.rows(); ++i) acc.add(g[static_cast<size_t>(i)] * cam.w.at(i, j));
        scores[static_cast<size_t>(j)] = acc.result() + cam.b.at(0, j);
    }
    std::vector<double> ls = log_softmax(scores);
    for (double& v : ls) v = std::exp(v);
    return ls;
}

EncoderNodes bind_encoder(Tape& t, Encoder& enc) {
    return {t.param(&enc.w1), t.param(&enc.b1), t.param(&enc.w2), t.param(&enc.b2)};
}

ValueId encode_on_tape(Tape& t, const EncoderNodes& e, ValueId frames) {
    ValueId h = t.elu(t.add_rowvec(t.matmul(frames, e.w1), e.b1));
    return t.add_rowvec(t.matmul(h, e.w2), e.b2);
}

LinearNodes bind_identity(Tape& t, IdentityClassifier& cls) {
    return {t.param(&cls.w), t.param(&cls.b)};
}

LinearNodes bind_camera(Tape& t, CameraClassifier& cls) {
    return {t.param(&cls.w), t.param(&cls.b)};
}

ValueId linear_logits(Tape& t, const LinearNodes& lin, ValueId reps) {
    return t.add_rowvec(t.matmul(reps, lin.w), lin.b);
}

// Checkpoint layout:
//   cawcl-checkpoint v1
//   dims <d_in> <d_h> <F> <N_I> <N_c>
//   grl_scale <value>
//   tensor <name> <rows> <cols>
//   ... rows x one line of cols values ("%.17g", exact double round-trip)

namespace {

void write_tensor(std::ostream& os, const std::string& name, const Tensor2& t) {
    os << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    char buf[40];
    for (int i = 0; i < t.rows(); ++i) {
        for (int j = 0; j < t.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", t.at(i, j));
            os << (j ? " " : "") << buf;
        }
        os << '\n';
    }
}

Tensor2 read_tensor(std::istream& is, const std::string& expect_name) {
    std::string tag, name;
    int rows = 0, cols = 0;
    if (!(is >> tag >> name >> rows >> cols) || tag != "tensor" || name != expect_name)
        throw DataError("checkpoint: expected tensor " + expect_name);
    Tensor2 t(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (!(is >> t.at(i, j))) throw DataError("checkpoint: truncated tensor " + expect_name);
    return t;
}

} // namespace

void write_checkpoint(const Model& m, std::ostream& os) {
    os << "cawcl-checkpoint v1\n";
    os << "dims " << m.enc.input_dim() << ' ' << m.enc.hidden_dim() << ' ' << m.enc.feature_dim()
       << ' ' << m.id_cls.num_classes() << ' ' << m.cam_cls.num_cameras() << '\n';
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", m.cam_cls.grl_scale);
    os << "grl_scale " << buf << '\n';
    const auto names = Model::param_names();
    Model& mm = const_cast<Model&>(m);
    const auto params = mm.all_params();
    for (size_t i = 0; i < params.size(); ++i) write_tensor(os, names[i], *params[i]);
}

Model read_checkpoint(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "cawcl-checkpoint v1")
        throw DataError("checkpoint: bad or missing version header");
    std::string tag;
    int d_in = 0, d_h = 0, feat = 0, n_id = 0, n_cam = 0;
    if (!(is >> tag >> d_in >> d_h >> feat >> n_id >> n_cam) || tag != "dims")
        throw DataError("checkpoint: bad dims line");
    double grl = 1.0;
    if (!(is >> tag >> grl) || tag != "grl_scale") throw DataError("checkpoint: bad grl_scale line");

    Model m;
    m.cam_cls.grl_scale = grl;
    const auto names = Model::param_names();
    std::vector<Tensor2> tensors;
    tensors.reserve(names.size());
    for (const auto& name : names) tensors.push_back(read_tensor(is, name));
    m.enc.w1 = std::move(tensors[0]);
    m.enc.b1 = std::move(tensors[1]);
    m.enc.w2 = std::move(tensors[2]);
    m.enc.b2 = std::move(tensors[3]);
    m.id_cls.w = std::move(tensors[4]);
    m.id_cls.b = std::move(tensors[5]);
    m.cam_cls.w = std::move(tensors[6]);
    m.cam_cls.b = std::move(tensors[7]);
    if (m.enc.input_dim() != d_in || m.enc.hidden_dim() != d_h || m.enc.feature_dim() != feat ||
        m.id_cls.num_classes() != n_id || m.cam_cls.num_cameras() != n_cam)
        throw DataError("checkpoint: dims line disagrees with tensor shapes");
    return m;
}

void save_checkpoint(const Model& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("checkpoint: cannot open for write: " + path);
    write_checkpoint(m, os);
    if (!os) throw DataError("checkpoint: write failed: " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("checkpoint: cannot open: " + path);
    return read_checkpoint(is);
}

} // namespace cawcl::model
