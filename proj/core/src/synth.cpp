#include "gazenli/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "gazenli/errors.hpp"

namespace gazenli {

namespace {

/// Draws shaped directly from mt19937_64 output, so generated datasets are
/// bit-stable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal(double sigma) {  // Box-Muller, fresh pair each call
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

struct TagSpec {
  const char* ptb;
  const char* upos;
  const char* dep;
  double weight;
  int len_lo;
  int len_hi;
};

// Small fixed tagset. upos and dep are deliberately many-to-one over the
// PTB tags so the three label vocabularies aggregate differently.
constexpr TagSpec kTagset[] = {
    {"DT", "DET", "det", 0.12, 2, 4},    {"NN", "NOUN", "nsubj", 0.18, 3, 9},
    {"NNS", "NOUN", "dobj", 0.08, 4, 10}, {"VB", "VERB", "root", 0.09, 3, 8},
    {"VBD", "VERB", "root", 0.08, 4, 9}, {"PRP", "PRON", "nsubj", 0.10, 2, 4},
    {"IN", "ADP", "prep", 0.12, 2, 4},   {"JJ", "ADJ", "amod", 0.10, 4, 9},
    {"RB", "ADV", "advmod", 0.08, 4, 8}, {"CD", "NUM", "num", 0.05, 1, 4},
};
constexpr std::size_t kTagCount = sizeof(kTagset) / sizeof(kTagset[0]);

std::size_t draw_tag(Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < kTagCount; ++i) {
    acc += kTagset[i].weight;
    if (u < acc) return i;
  }
  return kTagCount - 1;
}

double multiplier(const std::map<std::string, double>& m, const std::string& k) {
  auto it = m.find(k);
  return it == m.end() ? 1.0 : it->second;
}

double multiplier(const std::map<int, double>& m, int k) {
  auto it = m.find(k);
  return it == m.end() ? 1.0 : it->second;
}

void validate_config(const SynthConfig& c) {
  if (c.languages.empty()) throw ConfigError("synth config has no languages");
  std::set<std::string> labels;
  for (const auto& lang : c.languages) {
    if (lang.label.empty()) throw ConfigError("empty language label");
    if (!labels.insert(lang.label).second) {
      throw ConfigError("duplicate language label '" + lang.label + "'");
    }
    for (const auto& [tag, m] : lang.pos_multiplier) {
      if (m <= 0.0) {
        throw ConfigError("non-positive pos multiplier for " + lang.label +
                          ":" + tag);
      }
    }
    for (const auto& [len, m] : lang.length_multiplier) {
      if (m <= 0.0) {
        throw ConfigError("non-positive length multiplier for " + lang.label);
      }
    }
  }
  if (c.subjects_per_language < 1) throw ConfigError("need >= 1 subject per language");
  if (c.sentences < 1) throw ConfigError("need >= 1 sentence");
  if (c.min_tokens < 1 || c.max_tokens < c.min_tokens) {
    throw ConfigError("bad tokens_per_sentence range");
  }
  if (c.base_duration_ms <= 0.0) throw ConfigError("base duration must be positive");
  if (c.subject_speed_sigma < 0.0 || c.noise_sigma < 0.0) {
    throw ConfigError("sigmas must be non-negative");
  }
  if (c.refixation_prob < 0.0 || c.refixation_prob > 1.0 ||
      c.skip_prob < 0.0 || c.skip_prob > 1.0) {
    throw ConfigError("probabilities must lie in [0, 1]");
  }
}

std::string sentence_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%05d", index);
  return buf;
}

std::string subject_name(const std::string& label, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_s%03d", index);
  return label + buf;
}

}  // namespace

Dataset generate(const SynthConfig& config) {
  validate_config(config);
  Rng rng(config.seed);

  const int n_subjects =
      static_cast<int>(config.languages.size()) * config.subjects_per_language;
  const int n_batches = config.regime == Regime::kShared ? 1 : n_subjects;

  Dataset d;
  d.regime = config.regime;

  // 1. Sentences (all batches up front).
  std::vector<std::vector<std::string>> batch_ids(n_batches);
  std::map<std::string, std::vector<std::size_t>> tags_by_sentence;
  int sentence_counter = 0;
  for (int b = 0; b < n_batches; ++b) {
    for (int si = 0; si < config.sentences; ++si) {
      AnnotatedSentence s;
      s.sentence_id = sentence_name(sentence_counter);
      const int n_tokens = rng.uniform_int(config.min_tokens, config.max_tokens);
      std::vector<std::size_t> tags;
      for (int t = 0; t < n_tokens; ++t) {
        const std::size_t tag = draw_tag(rng);
        const TagSpec& spec = kTagset[tag];
        const int len = rng.uniform_int(spec.len_lo, spec.len_hi);
        AnnotatedToken tok;
        tok.surface.reserve(static_cast<std::size_t>(len));
        for (int c = 0; c < len; ++c) {
          tok.surface.push_back(static_cast<char>('a' + rng.uniform_int(0, 25)));
        }
        tok.ptb_pos = spec.ptb;
        tok.upos = spec.upos;
        tok.dep_label = spec.dep;
        tok.char_length = static_cast<std::size_t>(len);
        tags.push_back(tag);
        s.tokens.push_back(std::move(tok));
      }
      batch_ids[b].push_back(s.sentence_id);
      tags_by_sentence.emplace(s.sentence_id, std::move(tags));
      d.sentences.emplace(s.sentence_id, std::move(s));
      ++sentence_counter;
    }
  }

  // 2. Subjects, language-major in config order.
  struct SubjectDraw {
    std::string id;
    const LanguageEffect* lang;
    double speed;
    int batch;
  };
  std::vector<SubjectDraw> subject_draws;
  int subject_counter = 0;
  for (const auto& lang : config.languages) {
    for (int i = 0; i < config.subjects_per_language; ++i) {
      SubjectDraw sd;
      sd.id = subject_name(lang.label, i + 1);
      sd.lang = &lang;
      sd.speed = std::exp(rng.normal(config.subject_speed_sigma));
      sd.batch = config.regime == Regime::kShared ? 0 : subject_counter;
      const int score = 28 + rng.uniform_int(0, 20);
      d.subjects.push_back(SubjectRecord{sd.id, lang.label, score});
      subject_draws.push_back(std::move(sd));
      ++subject_counter;
    }
  }

  // 3. Events, subject-major, batch sentences in id order.
  for (const auto& sd : subject_draws) {
    for (const std::string& sid : batch_ids[sd.batch]) {
      const AnnotatedSentence& sent = d.sentences.at(sid);
      const std::vector<std::size_t>& tags = tags_by_sentence.at(sid);

      Trial trial;
      trial.subject_id = sd.id;
      trial.sentence_id = sid;

      struct Pending {
        std::size_t word;
        double duration;
      };
      std::optional<Pending> pending;
      auto push_event = [&trial](std::size_t word, double duration) {
        trial.events.push_back(
            FixationEvent{trial.events.size(), word, duration});
      };

      auto draw_duration = [&](std::size_t w) {
        const TagSpec& spec = kTagset[tags[w]];
        return config.base_duration_ms *
               multiplier(sd.lang->pos_multiplier, spec.ptb) *
               multiplier(sd.lang->length_multiplier,
                          static_cast<int>(sent.tokens[w].char_length)) *
               sd.speed * std::exp(rng.normal(config.noise_sigma));
      };

      for (std::size_t w = 0; w < sent.tokens.size(); ++w) {
        if (rng.uniform() < config.skip_prob) continue;
        const double duration = draw_duration(w);
        push_event(w, duration);
        if (pending) {
          // Refixation lands after the next word's event, so TF > FP there.
          push_event(pending->word, pending->duration);
          pending.reset();
        }
        if (rng.uniform() < config.refixation_prob) {
          pending = Pending{w, duration * (0.3 + 0.4 * rng.uniform())};
        }
      }
      if (pending) push_event(pending->word, pending->duration);

      if (trial.events.empty()) {
        // Every trial fixates at least one word; an all-skip draw would give
        // downstream normalizers an empty scope.
        push_event(0, draw_duration(0));
      }
      d.trials.push_back(std::move(trial));
    }
  }

  std::sort(d.trials.begin(), d.trials.end(), [](const Trial& a, const Trial& b) {
    return std::tie(a.subject_id, a.sentence_id) <
           std::tie(b.subject_id, b.sentence_id);
  });
  std::sort(d.subjects.begin(), d.subjects.end(),
            [](const SubjectRecord& a, const SubjectRecord& b) {
              return a.subject_id < b.subject_id;
            });
  return d;
}

SimilarityMatrix planted_similarity(const SynthConfig& config) {
  if (config.languages.size() < 2) {
    throw ConfigError("planted similarity needs >= 2 languages");
  }
  std::set<std::string> pos_keys;
  std::set<int> len_keys;
  for (const auto& lang : config.languages) {
    for (const auto& [tag, m] : lang.pos_multiplier) pos_keys.insert(tag);
    for (const auto& [len, m] : lang.length_multiplier) len_keys.insert(len);
  }

  std::vector<std::vector<double>> effect;
  for (const auto& lang : config.languages) {
    std::vector<double> v;
    for (const auto& tag : pos_keys) {
      v.push_back(std::log(multiplier(lang.pos_multiplier, tag)));
    }
    for (int len : len_keys) {
      v.push_back(std::log(multiplier(lang.length_multiplier, len)));
    }
    effect.push_back(std::move(v));
  }

  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  SimilarityMatrix m;
  for (const auto& lang : config.languages) m.labels.push_back(lang.label);
  const std::size_t n = m.labels.size();
  m.values.assign(n * n, 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double na = norm(effect[a]);
      const double nb = norm(effect[b]);
      double s;
      if (na == 0.0 && nb == 0.0) {
        s = 1.0;  // identical all-neutral effects
      } else if (na == 0.0 || nb == 0.0) {
        s = 0.0;
      } else {
        double dot = 0.0;
        for (std::size_t i = 0; i < effect[a].size(); ++i) {
          dot += effect[a][i] * effect[b][i];
        }
        s = dot / (na * nb);
      }
      m.at(a, b) = s;
      m.at(b, a) = s;
    }
  }
  return m;
}

namespace {

// The default scenario plants effects in a two-direction log-multiplier
// space: an "article-less" direction (fast determiners/pronouns, slow nouns)
// and a "Romance-like" direction (slow adpositions/adjectives). Chinese and
// Japanese sit mostly along the first, Portuguese and Spanish mostly along
// the second, making each pair tight and the cross pairs distant under both
// cosine similarity and effect distance.
LanguageEffect make_effect(const std::string& label, double c1, double c2) {
  static const std::map<std::string, double> d1 = {
      {"DT", -0.36}, {"PRP", -0.30}, {"NN", 0.26},
      {"NNS", 0.20}, {"VBD", 0.10},  {"CD", -0.10}};
  static const std::map<std::string, double> d2 = {
      {"IN", 0.40}, {"JJ", 0.28}, {"RB", 0.20}, {"VB", 0.16}, {"NN", 0.10}};
  static const std::map<int, double> dl1 = {
      {6, 0.04}, {7, 0.06}, {8, 0.08}, {9, 0.10}, {10, 0.10}};
  static const std::map<int, double> dl2 = {
      {1, 0.04}, {2, 0.06}, {3, 0.06}, {4, 0.04}};

  LanguageEffect e;
  e.label = label;
  std::set<std::string> tags;
  for (const auto& [t, v] : d1) tags.insert(t);
  for (const auto& [t, v] : d2) tags.insert(t);
  for (const auto& t : tags) {
    double log_m = 0.0;
    if (auto it = d1.find(t); it != d1.end()) log_m += c1 * it->second;
    if (auto it = d2.find(t); it != d2.end()) log_m += c2 * it->second;
    e.pos_multiplier[t] = std::exp(log_m);
  }
  std::set<int> lens;
  for (const auto& [l, v] : dl1) lens.insert(l);
  for (const auto& [l, v] : dl2) lens.insert(l);
  for (int l : lens) {
    double log_m = 0.0;
    if (auto it = dl1.find(l); it != dl1.end()) log_m += c1 * it->second;
    if (auto it = dl2.find(l); it != dl2.end()) log_m += c2 * it->second;
    e.length_multiplier[l] = std::exp(log_m);
  }
  return e;
}

}  // namespace

SynthConfig scenario(const std::string& name) {
  SynthConfig c;
  if (name == "default") {
    c.languages = {
        make_effect("Chinese", 1.00, 0.00),
        make_effect("Japanese", 0.80, 0.30),
        make_effect("Portuguese", 0.25, 0.85),
        make_effect("Spanish", 0.05, 1.05),
    };
    c.subjects_per_language = 36;
    c.sentences = 78;
    c.noise_sigma = 0.03;
    c.skip_prob = 0.005;
    c.refixation_prob = 0.05;
    c.subject_speed_sigma = 0.18;
    return c;
  }
  if (name == "null") {
    for (const char* label : {"Chinese", "Japanese", "Portuguese", "Spanish"}) {
      LanguageEffect e;
      e.label = label;
      e.pos_multiplier["DT"] = 1.0;  // identical, neutral effects
      c.languages.push_back(std::move(e));
    }
    c.subjects_per_language = 36;
    c.sentences = 78;
    c.noise_sigma = 0.12;
    c.skip_prob = 0.03;
    c.refixation_prob = 0.12;
    c.subject_speed_sigma = 0.18;
    return c;
  }
  if (name == "native-binary") {
    LanguageEffect english;
    english.label = "English";
    LanguageEffect nodet;
    nodet.label = "Chinese";
    nodet.pos_multiplier["DT"] = 0.7;
    nodet.pos_multiplier["PRP"] = 0.7;
    c.languages = {english, nodet};
    c.subjects_per_language = 24;
    c.sentences = 78;
    c.noise_sigma = 0.12;
    c.skip_prob = 0.03;
    c.refixation_prob = 0.12;
    c.subject_speed_sigma = 0.18;
    return c;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::vector<std::string> scenario_names() {
  return {"default", "null", "native-binary"};
}

std::string scenario_manifest(const SynthConfig& config) {
  std::ostringstream out;
  out << "gazenli synth scenario\n";
  out << "regime=" << to_string(config.regime) << "\n";
  out << "seed=" << config.seed << "\n";
  out << "subjects_per_language=" << config.subjects_per_language << "\n";
  out << "sentences=" << config.sentences << "\n";
  out << "tokens_per_sentence=" << config.min_tokens << ".."
      << config.max_tokens << "\n";
  out << "base_duration_ms=" << config.base_duration_ms << "\n";
  out << "subject_speed_sigma=" << config.subject_speed_sigma << "\n";
  out << "noise_sigma=" << config.noise_sigma << "\n";
  out << "refixation_prob=" << config.refixation_prob << "\n";
  out << "skip_prob=" << config.skip_prob << "\n";
  for (const auto& lang : config.languages) {
    out << "language " << lang.label << "\n";
    for (const auto& [tag, m] : lang.pos_multiplier) {
      out << "  pos " << tag << " " << m << "\n";
    }
    for (const auto& [len, m] : lang.length_multiplier) {
      out << "  len " << len << " " << m << "\n";
    }
  }
  if (config.languages.size() >= 2) {
    SimilarityMatrix sim = planted_similarity(config);
    out << "planted_similarity\n";
    for (std::size_t a = 0; a < sim.labels.size(); ++a) {
      for (std::size_t b = a + 1; b < sim.labels.size(); ++b) {
        out << "  " << sim.labels[a] << " " << sim.labels[b] << " "
            << sim.at(a, b) << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace gazenli
