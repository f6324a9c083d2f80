#ifndef CAWCL_MODEL_HPP
#define CAWCL_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cawcl/tape.hpp"

namespace cawcl::model {

// Two-layer perceptron with an ELU hidden layer. ELU is smooth enough for
// finite-difference gates and passes positive inputs through unchanged.
struct Encoder {
    Tensor2 w1; // d_in x d_h
    Tensor2 b1; // 1 x d_h
    Tensor2 w2; // d_h x F
    Tensor2 b2; // 1 x F

    int input_dim() const { return w1.rows(); }
    int hidden_dim() const { return w1.cols(); }
    int feature_dim() const { return w2.cols(); }
};

struct IdentityClassifier {
    Tensor2 w; // F x N_I
    Tensor2 b; // 1 x N_I
    int num_classes() const { return w.cols(); }
};

struct CameraClassifier {
    Tensor2 w; // F x N_c
    Tensor2 b; // 1 x N_c
    double grl_scale = 1.0;
    int num_cameras() const { return w.cols(); }
};

struct Model {
    Encoder enc;
    IdentityClassifier id_cls;
    CameraClassifier cam_cls;

    std::vector<Tensor2*> encoder_params();
    std::vector<Tensor2*> identity_params();
    std::vector<Tensor2*> camera_params();
    std::vector<Tensor2*> all_params();
    // Stable names matching all_params() order; used by checkpoints and Adam state.
    static std::vector<std::string> param_names();
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] from the given seed.
Model init_model(int d_in, int d_h, int feat, int n_identities, int n_cameras,
                 double grl_scale, std::uint64_t seed);

// ---- plain (tape-free) forward paths ----

// Single frame -> feature vector of dim F.
std::vector<double> encode_frame(const Encoder& enc, std::span<const double> x);

// All rows of `frames` encoded at once -> (rows x F).
Tensor2 encode_frames(const Encoder& enc, const Tensor2& frames);

// Mean of already-encoded frame vectors; permutation-invariant.
std::vector<double> aggregate(const Tensor2& encoded_frames);

// Identity in the forward pass; the tape counterpart flips the gradient.
std::vector<double> grl_forward(std::span<const double> g);

// Softmax over camera scores w^T g + b; entries sum to 1.
std::vector<double> camera_probs(const CameraClassifier& cam, std::span<const double> g);

// ---- tape-side builders ----

struct EncoderNodes {
    ValueId w1, b1, w2, b2;
};
EncoderNodes bind_encoder(Tape& t, Encoder& enc);

// frames (n x d_in) through the bound encoder -> (n x F).
ValueId encode_on_tape(Tape& t, const EncoderNodes& e, ValueId frames);

struct LinearNodes {
    ValueId w, b;
};
LinearNodes bind_identity(Tape& t, IdentityClassifier& cls);
LinearNodes bind_camera(Tape& t, CameraClassifier& cls);

// reps (n x F) -> logits (n x classes).
ValueId linear_logits(Tape& t, const LinearNodes& lin, ValueId reps);

// ---- checkpoint file (plain text, exact round-trip) ----

void save_checkpoint(const Model& m, const std::string& path);
Model load_checkpoint(const std::string& path);
void write_checkpoint(const Model& m, std::ostream& os);
Model read_checkpoint(std::istream& is);

} // namespace cawcl::model

#endif
