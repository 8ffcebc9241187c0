// Copyright 2026 The Unicap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "harness/synthetic_world.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "alignment/image_data.h"
#include "common/error.h"
#include "common/rng.h"
#include "concept_lexicon/concept_lexicon.h"
#include "json.hpp"

namespace unicap {
namespace {

// Words 0 and 1 are the probe pair.
constexpr const char* kWords[] = {"boat",  "water", "dog",   "ball",  "cat",   "sofa",  "car",   "street",
                                  "tree",  "bird",  "man",   "horse", "table", "pizza", "train", "bench",
                                  "kite",  "sky",   "cow",   "grass", "bus",   "road",  "plate", "clock",
                                  "bear",  "snow",  "girl",  "phone", "chair", "lamp"};
constexpr const char* kAdjectives[] = {"red", "small", "big", "white", "old", "young"};

enum Stream : uint64_t { kStructure = 1, kSentences = 2, kImages = 3, kDetector = 4, kReferences = 5, kNoise = 6, kAppearance = 7 };

std::string Word(int c) {
  constexpr int n = sizeof(kWords) / sizeof(kWords[0]);
  return c < n ? kWords[c] : "object" + std::to_string(c);
}

class Generator {
 public:
  explicit Generator(SyntheticWorld& w) : w_(w), n_(w.options.n_concepts) {}

  Scene SampleScene(Rng& rng) const {
    const auto kind = w_.options.kind;
    if (kind == WorldKind::kIdentity) return {static_cast<int>(rng.UniformIndex(n_))};
    if (kind == WorldKind::kClusters) {
      const int head = 2 * static_cast<int>(rng.UniformIndex(n_ / 2));
      return {head, head + 1};
    }
    for (;;) {
      Scene s;
      const int seeds = rng.Uniform() < 0.6 ? 1 : 2;
      while (static_cast<int>(s.size()) < seeds) {
        const int c = static_cast<int>(rng.UniformIndex(n_));
        if (std::find(s.begin(), s.end(), c) == s.end()) s.push_back(c);
      }
      for (size_t i = 0; i < s.size(); ++i) {
        for (int d = 0; d < n_; ++d) {
          const double p = w_.cooccurrence[s[i]][d];
          if (d == s[i] || p <= 0 || std::find(s.begin(), s.end(), d) != s.end()) continue;
          if (p >= 1 || rng.Uniform() < p) s.push_back(d);
        }
      }
      const bool has_a = std::find(s.begin(), s.end(), w_.probe_a) != s.end();
      const bool has_b = std::find(s.begin(), s.end(), w_.probe_b) != s.end();
      if (kind == WorldKind::kControl && has_a && has_b) continue;
      return s;
    }
  }

  std::string Render(const Scene& s, Rng& rng) const {
    std::vector<std::string> np;
    for (int c : s) {
      std::string phrase = w_.words[c];
      if (rng.Uniform() < 0.3) {
        phrase = std::string(kAdjectives[rng.UniformIndex(std::size(kAdjectives))]) + " " + phrase;
      }
      np.push_back(phrase);
    }
    const size_t t = rng.UniformIndex(4);
    if (np.size() == 1) {
      static const char* one[] = {"a %", "there is a % in the picture", "a photo of a %", "the % is here"};
      return Fill(one[t], np);
    }
    if (np.size() == 2) {
      static const char* two[] = {"a % on the %", "a % next to a %", "the % and the %", "a photo of a % with a %"};
      return Fill(two[t], np);
    }
    std::string out = t % 2 ? "a photo of a " + np[0] : "a " + np[0];
    for (size_t i = 1; i < np.size(); ++i) out += (i + 1 == np.size() ? " and a " : " with a ") + np[i];
    return out;
  }

 private:
  static std::string Fill(std::string_view pattern, const std::vector<std::string>& np) {
    std::string out;
    size_t k = 0;
    for (char ch : pattern) {
      if (ch == '%') {
        out += np[k++];
      } else {
        out += ch;
      }
    }
    return out;
  }

  SyntheticWorld& w_;
  int n_;
};

}  // namespace

WorldKind ParseWorldKind(std::string_view name) {
  if (name == "probe") return WorldKind::kProbe;
  if (name == "control") return WorldKind::kControl;
  if (name == "identity") return WorldKind::kIdentity;
  if (name == "clusters") return WorldKind::kClusters;
  throw ValidationError("unknown world kind '" + std::string(name) + "' (probe, control, identity, clusters)");
}

std::string_view WorldKindName(WorldKind kind) {
  switch (kind) {
    case WorldKind::kProbe:
      return "probe";
    case WorldKind::kControl:
      return "control";
    case WorldKind::kIdentity:
      return "identity";
    case WorldKind::kClusters:
      return "clusters";
  }
  return "?";
}

void SynthOptions::Validate() const {
  if (n_concepts < 4) throw ValidationError("n_concepts must be >= 4");
  if (kind == WorldKind::kClusters && n_concepts % 2) throw ValidationError("clusters world needs an even n_concepts");
  if (n_images < 1 || n_sentences < 1) throw ValidationError("n_images and n_sentences must be >= 1");
  if (feature_dim < 1) throw ValidationError("feature_dim must be >= 1");
  if (feature_noise < 0) throw ValidationError("feature_noise must be >= 0");
  if (appearance_noise < 0) throw ValidationError("appearance_noise must be >= 0");
  if (detector_noise < 0 || detector_noise > 1) throw ValidationError("detector_noise must be in [0, 1]");
  if (references_per_image < 1) throw ValidationError("references_per_image must be >= 1");
}

SyntheticWorld GenerateWorld(const SynthOptions& options) {
  options.Validate();
  SyntheticWorld w;
  w.options = options;
  const int n = options.n_concepts;
  for (int c = 0; c < n; ++c) {
    w.words.push_back(Word(c));
    w.concept_ids.push_back(w.words.back() + ".n.01");
  }
  w.detectable.assign(n, true);
  w.cooccurrence.assign(n, std::vector<double>(n, 0.0));
  for (int c = 0; c < n; ++c) w.cooccurrence[c][c] = 1;
  switch (options.kind) {
    case WorldKind::kProbe:
      w.cooccurrence[0][1] = 1;
      [[fallthrough]];
    case WorldKind::kControl:
      w.probe_a = 0;
      w.probe_b = 1;
      w.detectable[1] = false;
      break;
    case WorldKind::kIdentity:
      break;
    case WorldKind::kClusters:
      for (int c = 0; c < n; c += 2) w.cooccurrence[c][c + 1] = 1;
      break;
  }

  Generator gen(w);
  Rng sentence_rng(DeriveSeed(options.seed, kSentences));
  for (int j = 0; j < options.n_sentences; ++j) {
    w.sentence_scenes.push_back(gen.SampleScene(sentence_rng));
    w.sentences.push_back(gen.Render(w.sentence_scenes.back(), sentence_rng));
  }

  // Fixed projection of the concept indicator into feature space.
  Rng structure(DeriveSeed(options.seed, kStructure));
  nn::Matrix<float> proj(n, options.feature_dim);
  for (auto& v : proj.values()) v = static_cast<float>(structure.Normal());

  Rng image_rng(DeriveSeed(options.seed, kImages));
  Rng noise_rng(DeriveSeed(options.seed, kNoise));
  Rng appearance_rng(DeriveSeed(options.seed, kAppearance));
  Rng detector_rng(DeriveSeed(options.seed, kDetector));
  Rng reference_rng(DeriveSeed(options.seed, kReferences));
  std::vector<int> detectable_ids;
  for (int c = 0; c < n; ++c)
    if (w.detectable[c]) detectable_ids.push_back(c);
  w.features = nn::Matrix<float>(options.n_images, options.feature_dim);
  for (int i = 0; i < options.n_images; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "img%05d", i);
    w.image_ids.push_back(id);
    const Scene scene = gen.SampleScene(image_rng);
    w.image_scenes.push_back(scene);

    std::vector<double> x(n, 0.0);
    for (int c : scene) x[c] = 1;
    for (auto& v : x) v += options.feature_noise * noise_rng.Normal();
    auto row = w.features.row(i);
    for (int c = 0; c < n; ++c) {
      if (x[c] == 0) continue;
      const auto p = proj.row(c);
      for (int d = 0; d < options.feature_dim; ++d) row[d] += static_cast<float>(x[c] * p[d]);
    }
    if (options.appearance_noise > 0) {
      for (auto& v : row) v += static_cast<float>(options.appearance_noise * appearance_rng.Normal());
    }

    std::vector<std::string> labels;
    for (int c : scene) {
      if (!w.detectable[c]) continue;
      if (options.detector_noise > 0 && detector_rng.Uniform() < options.detector_noise) continue;
      labels.push_back(w.words[c]);
    }
    if (options.detector_noise > 0 && detector_rng.Uniform() < options.detector_noise) {
      const int c = detectable_ids[detector_rng.UniformIndex(detectable_ids.size())];
      if (std::find(labels.begin(), labels.end(), w.words[c]) == labels.end()) labels.push_back(w.words[c]);
    }
    w.detections.push_back(std::move(labels));
    for (int r = 0; r < options.references_per_image; ++r) {
      w.references.emplace_back(w.image_ids.back(), gen.Render(scene, reference_rng));
    }
  }
  return w;
}

void WriteWorld(const SyntheticWorld& w, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open(WorldFiles::kCorpus);
    for (const auto& s : w.sentences) out << s << '\n';
  }
  {
    ConceptLexicon lex;
    for (size_t c = 0; c < w.words.size(); ++c) lex.AddSurface(w.words[c], w.concept_ids[c]);
    auto out = open(WorldFiles::kLexicon);
    lex.Write(out);
  }
  WriteFeatures(dir / WorldFiles::kFeatures, dir / WorldFiles::kIds, FeatureTable{w.image_ids, w.features});
  {
    std::map<std::string, std::vector<std::string>> det;
    for (size_t i = 0; i < w.image_ids.size(); ++i) det[w.image_ids[i]] = w.detections[i];
    WriteDetections(dir / WorldFiles::kDetections, det);
  }
  WriteIdTextPairs(dir / WorldFiles::kReferences, w.references);
  {
    nlohmann::json j;
    j["kind"] = WorldKindName(w.options.kind);
    j["seed"] = w.options.seed;
    j["n_images"] = w.options.n_images;
    j["n_sentences"] = w.options.n_sentences;
    j["feature_dim"] = w.options.feature_dim;
    j["feature_noise"] = w.options.feature_noise;
    j["appearance_noise"] = w.options.appearance_noise;
    j["detector_noise"] = w.options.detector_noise;
    nlohmann::json concepts = nlohmann::json::array();
    for (size_t c = 0; c < w.words.size(); ++c) {
      concepts.push_back(
          {{"id", w.concept_ids[c]}, {"word", w.words[c]}, {"detectable", static_cast<bool>(w.detectable[c])}});
    }
    j["concepts"] = concepts;
    j["cooccurrence"] = w.cooccurrence;
    if (w.probe_a >= 0) j["probe"] = {{"detectable", w.concept_ids[w.probe_a]}, {"hidden", w.concept_ids[w.probe_b]}};
    auto out = open(WorldFiles::kWorld);
    out << j.dump(2) << '\n';
  }
  {
    auto out = open(WorldFiles::kConfig);
    out << "seed = " << w.options.seed << '\n'
        << "paths.corpus = " << WorldFiles::kCorpus << '\n'
        << "paths.lexicon = " << WorldFiles::kLexicon << '\n'
        << "paths.features = " << WorldFiles::kFeatures << '\n'
        << "paths.ids = " << WorldFiles::kIds << '\n'
        << "paths.detections = " << WorldFiles::kDetections << '\n'
        << "paths.references = " << WorldFiles::kReferences << '\n';
  }
}

}  // namespace unicap
