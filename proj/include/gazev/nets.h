// gazev/nets.h

// Copyright 2026  GAZEV-VC Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEV_NETS_H_
#define GAZEV_NETS_H_

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gazev/autograd.h"

namespace gazev {

enum class ConditioningMode { kGazev, kStarGanBaseline };

std::string ModeName(ConditioningMode mode);
ConditioningMode ParseMode(const std::string &name);

enum class Gender { kMale = 0, kFemale = 1 };

/// Architecture of all five networks. Defaults are the full-width model;
/// the desk configuration only narrows channel widths.
struct NetConfig {
  ConditioningMode mode = ConditioningMode::kGazev;
  int num_speakers = 0;  // n-way conditioning in baseline mode

  int mcc_dim = 36;
  int num_frames = 256;

  // Generator. Widths run c, 2c, 4c down and 4c, 2c, c up; the residual
  // stage runs at 4c.
  int gen_channels = 64;
  int gen_down_kernel_h = 4, gen_down_kernel_w = 8;
  int gen_res_kernel = 3;
  int gen_plain_blocks = 3;
  int gen_adain_blocks = 3;
  int gen_up_kernel_h = 4, gen_up_kernel_w = 4;
  int gen_out_kernel = 3;

  // Discriminator trunk, shared with the classifier.
  int dis_channels = 64;
  int dis_blocks = 5;
  int dis_kernel = 4;
  int dis_head_kernel = 3;

  // Speaker embedding generator F.
  int prior_dim = 16;
  int embed_dim = 64;
  int prior_hidden = 512;
  int prior_layers = 5;

  // Speaker encoder E.
  int enc_channels = 32;
  int enc_blocks = 5;
  int enc_kernel = 3;

  BaseFloat norm_eps = 1e-5;
  BaseFloat leaky_slope = 0.2;

  /// Width of the conditioning code for D (and G in baseline mode).
  int CondDim() const;
  /// Number of classifier outputs (2 genders, or n speakers).
  int NumClasses() const;
  int BottleneckChannels() const { return 4 * gen_channels; }

  /// Throws if the geometry cannot round-trip mcc_dim x num_frames exactly.
  void Check() const;

  std::string ToJson() const;
  static NetConfig FromJson(const std::string &json);
  bool operator==(const NetConfig &other) const = default;
};

struct NamedParam {
  std::string name;
  Var var;
};

/// A set of named parameters. Names are "<net>.<block>.<tensor>".
class Network {
 public:
  const std::vector<NamedParam> &params() const { return params_; }
  void SetTrainable(bool trainable);
  std::size_t NumParameters() const;

 protected:
  Var AddParam(const std::string &name, Tensor value);
  Var AddUniform(const std::string &name, const Shape &shape, int fan_in,
                 std::mt19937_64 *rng);

 private:
  std::vector<NamedParam> params_;
};

struct ConvLayer {
  Var weight, bias;
  ConvGeometry geom;
  Var Apply(const Var &x) const { return Conv2d(x, weight, bias, geom); }
};

struct LinearLayer {
  Var weight, bias;
  Var Apply(const Var &x) const { return Linear(x, weight, bias); }
};

/// Instance normalisation followed by a learned per-channel affine.
struct NormLayer {
  Var gamma, beta;
};

/// AdaIN: instance normalisation whose per-channel scale and shift are
/// affine functions f(s), g(s) of the speaker embedding.
struct AdainLayer {
  LinearLayer scale_map;  // f
  LinearLayer shift_map;  // g
};

Var ApplyAdain(const Var &x, const Var &embedding, const AdainLayer &layer,
               BaseFloat eps);

/// Intermediate shapes reported by Generator::Forward.
struct GeneratorProbe {
  Shape entry, down1, bottleneck, up1, output;
};

class Generator : public Network {
 public:
  Generator(const NetConfig &config, std::mt19937_64 *rng);

  /// x: N x 1 x mcc_dim x num_frames.  cond: N x embed_dim x 1 x 1 speaker
  /// embedding (gazev) or N x num_speakers x 1 x 1 one-hot (baseline).
  Var Forward(const Var &x, const Var &cond,
              GeneratorProbe *probe = nullptr) const;

  /// Weights (not biases) of every AdaIN affine map.
  std::vector<Var> AdainWeights() const;

 private:
  struct ResBlock {
    ConvLayer conv1, conv2;
    NormLayer norm1, norm2;      // plain blocks, and adain blocks in baseline
    AdainLayer adain1, adain2;   // gazev adain blocks
    bool adaptive = false;
  };
  struct ConvNormBlock {
    ConvLayer conv;
    NormLayer norm;
  };

  ConvNormBlock MakeConvNorm(const std::string &name, int in, int out, int kh,
                             int kw, int stride, std::mt19937_64 *rng);
  NormLayer MakeNorm(const std::string &name, int channels);
  AdainLayer MakeAdain(const std::string &name, int channels,
                       std::mt19937_64 *rng);
  Var ApplyConvNorm(const Var &x, const ConvNormBlock &block) const;
  Var ApplyNorm(const Var &x, const NormLayer &norm) const;

  NetConfig config_;
  ConvNormBlock entry_, down1_, down2_, up1_, up2_;
  std::vector<ResBlock> blocks_;
  ConvLayer out_;
};

/// PatchGAN discriminator D(x, u) plus the classifier head C(x) sharing its
/// trunk. The classifier evaluates the trunk with the conditioning channels
/// zero-filled.
class PatchDiscriminator : public Network {
 public:
  PatchDiscriminator(const NetConfig &config, std::mt19937_64 *rng);

  /// Patch logits, N x 1 x GH x GW.
  Var Score(const Var &x, const Var &cond) const;
  /// Class logits, N x NumClasses x 1 x 1.
  Var Classify(const Var &x) const;

 private:
  Var Trunk(const Var &x, const Var &cond) const;

  NetConfig config_;
  std::vector<ConvLayer> trunk_;
  ConvLayer score_head_;
  LinearLayer class_head_;
};

/// Model F: speaker embedding from a Gaussian prior sample and gender.
class PriorEmbedder : public Network {
 public:
  PriorEmbedder(const NetConfig &config, std::mt19937_64 *rng);
  /// z: N x prior_dim x 1 x 1, gender: N x 2 x 1 x 1 one-hot.
  Var Forward(const Var &z, const Var &gender) const;

 private:
  std::vector<LinearLayer> hidden_;
  LinearLayer head_;
};

/// Model E: speaker embedding from an utterance segment and gender.
class UtteranceEncoder : public Network {
 public:
  UtteranceEncoder(const NetConfig &config, std::mt19937_64 *rng);
  Var Forward(const Var &x, const Var &gender) const;

 private:
  struct PreActBlock {
    ConvLayer conv1, conv2;
  };
  NetConfig config_;
  ConvLayer stem_;
  std::vector<PreActBlock> blocks_;
  LinearLayer head_;
};

/// All networks of one model. F and E exist only in gazev mode.
class VcModel {
 public:
  VcModel(const NetConfig &config, std::uint64_t seed);

  const NetConfig &config() const { return config_; }
  const Generator &generator() const { return *generator_; }
  const PatchDiscriminator &discriminator() const { return *discriminator_; }
  bool has_embedders() const { return prior_ != nullptr; }
  const PriorEmbedder &prior() const;
  const UtteranceEncoder &encoder() const;

  /// Parameters updated by the generator phase (G, F, E).
  std::vector<NamedParam> GeneratorSideParams() const;
  /// Parameters updated by the discriminator phase (D and C).
  std::vector<NamedParam> CriticSideParams() const;
  std::vector<NamedParam> AllParams() const;

 private:
  NetConfig config_;
  std::unique_ptr<Generator> generator_;
  std::unique_ptr<PatchDiscriminator> discriminator_;
  std::unique_ptr<PriorEmbedder> prior_;
  std::unique_ptr<UtteranceEncoder> encoder_;
};

/// N x classes x 1 x 1 one-hot rows.
Tensor OneHot(const std::vector<int> &labels, int classes);

/// Checks that a tensor is N x 1 x mcc_dim x num_frames.
void CheckSegmentShape(const Tensor &x, const NetConfig &config,
                       const char *stage);

}  // namespace gazev

#endif  // GAZEV_NETS_H_
