// Python bindings for the matching, reward, curriculum and episode layers.
// Conversions stay simple: paths travel as lists of [x, y, z], results come
// back as plain tuples and dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajmatch/curriculum.hpp"
#include "trajmatch/dtw.hpp"
#include "trajmatch/env.hpp"
#include "trajmatch/geometry.hpp"
#include "trajmatch/io.hpp"
#include "trajmatch/reward.hpp"
#include "trajmatch/rng.hpp"
#include "trajmatch/signature.hpp"

namespace py = pybind11;
using namespace trajmatch;

namespace {

using PyPoints = std::vector<std::array<double, 3>>;

Path to_path(const PyPoints& pts) {
  Path p;
  p.points.reserve(pts.size());
  for (const auto& q : pts) p.points.push_back({q[0], q[1], q[2]});
  return p;
}

PyPoints from_path(const Path& p) {
  PyPoints out;
  out.reserve(p.size());
  for (const Vec3& q : p.points) out.push_back({q.x, q.y, q.z});
  return out;
}

Vec3 to_vec(const std::array<double, 3>& q) { return {q[0], q[1], q[2]}; }

Scheme scheme_or_throw(const std::string& name) {
  const auto s = scheme_from_name(name);
  if (!s) {
    throw std::invalid_argument("unknown scheme \"" + name +
                                "\" (expected none, state, dtw or signature)");
  }
  return *s;
}

py::dict report_dict(const SchemeReport& r) {
  py::dict d;
  d["scheme"] = scheme_name(r.scheme);
  d["episodes"] = r.episodes;
  d["successes"] = r.successes;
  d["success_rate"] = r.success_rate;
  d["mean_steps"] = r.mean_steps;
  d["mean_return"] = r.mean_return;
  d["wall_ms"] = r.wall_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trajectory matching and reward shaping toolkit";

  // Sequence alignment.
  m.def(
      "dtw_cost",
      [](const PyPoints& a, const PyPoints& b) {
        const DtwResult r = dtw_cost(to_path(a), to_path(b));
        return py::make_tuple(r.cost, r.alignment);
      },
      py::arg("a"), py::arg("b"),
      "Dynamic time warping cost and optimal alignment between two paths.");
  m.def(
      "dtw_cost_banded",
      [](const PyPoints& a, const PyPoints& b, std::size_t band) {
        const DtwResult r = dtw_cost_banded(to_path(a), to_path(b), band);
        return py::make_tuple(r.cost, r.alignment);
      },
      py::arg("a"), py::arg("b"), py::arg("band"),
      "DTW restricted to |i*Q/P - j| <= band; cost is inf when no path fits "
      "the band.");
  m.def(
      "soft_dtw_cost",
      [](const PyPoints& a, const PyPoints& b, double gamma) {
        return soft_dtw_cost(to_path(a), to_path(b), gamma);
      },
      py::arg("a"), py::arg("b"), py::arg("gamma"),
      "Soft-minimum relaxation of the DTW cost; approaches dtw_cost as gamma "
      "shrinks.");
  m.def(
      "dtw_imitation_reward",
      [](const PyPoints& window, const PyPoints& demo) {
        return dtw_imitation_reward(to_path(window), to_path(demo));
      },
      py::arg("window"), py::arg("demo"),
      "Reward in (0, 1] for a trailing window matched against its demo "
      "segment.");

  // Path signatures.
  m.def("signature_length", &signature_length, py::arg("level"),
        "Number of terms in a flattened signature truncated at `level`.");
  m.def(
      "signature",
      [](const PyPoints& pts, int level) {
        return signature(to_path(pts), level).terms;
      },
      py::arg("points"), py::arg("level"),
      "Flattened discrete path signature, level by level, 3-adic "
      "lexicographic order within each level.");
  m.def(
      "signature_distance",
      [](const std::vector<double>& a, const std::vector<double>& b,
         int level) {
        if (a.size() != signature_length(level) ||
            b.size() != signature_length(level)) {
          throw std::invalid_argument(
              "term count does not match the stated level");
        }
        return signature_distance(Signature{level, a}, Signature{level, b});
      },
      py::arg("a"), py::arg("b"), py::arg("level"),
      "Euclidean distance between two flattened signatures of equal level.");
  m.def(
      "signature_imitation_reward",
      [](const PyPoints& path, const PyPoints& demo, int level) {
        return signature_imitation_reward(to_path(path), to_path(demo), level);
      },
      py::arg("path"), py::arg("demo"), py::arg("level"),
      "Reward in (0, 1] comparing a rollout signature with the matched demo "
      "prefix signature.");

  m.def(
      "chamfer_distance",
      [](const PyPoints& a, const PyPoints& b) {
        PointSet sa{to_path(a).points};
        PointSet sb{to_path(b).points};
        return chamfer_distance(sa, sb);
      },
      py::arg("a"), py::arg("b"),
      "Symmetric mean of squared nearest-neighbour distances.");
  m.def("one_minus_tanh", &one_minus_tanh, py::arg("x"),
        "1 - tanh(x), computed to stay strictly positive far into the tail.");

  // Randomness.
  py::class_<Rng>(m, "Rng", "Deterministic random stream seeded explicitly.")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform01", &Rng::uniform01)
      .def("uniform", &Rng::uniform, py::arg("lo"), py::arg("hi"));

  // Demonstrations.
  py::class_<DemoSet>(m, "DemoSet",
                      "A set of assembly demonstrations sharing one assembly.")
      .def("__len__", &DemoSet::size)
      .def_readonly("assembly_id", &DemoSet::assembly_id)
      .def(
          "demo_id",
          [](const DemoSet& s, std::size_t i) {
            if (i >= s.size()) throw py::index_error();
            return s.demos[i].demo_id;
          },
          py::arg("i"))
      .def(
          "points",
          [](const DemoSet& s, std::size_t i) {
            if (i >= s.size()) throw py::index_error();
            return from_path(s.path(i));
          },
          py::arg("i"), "Waypoints of demo i as [x, y, z] triples.");

  m.def(
      "generate_demos",
      [](std::size_t count, std::uint64_t seed) {
        Rng rng(seed);
        return generate_disassembly_demos(EnvConfig{}, count, rng);
      },
      py::arg("count"), py::arg("seed"),
      "Reversed-disassembly demos in the socket frame (goal at the origin).");
  m.def(
      "load_demos", [](const std::string& file) { return load_demoset(file); },
      py::arg("file"));
  m.def(
      "save_demos",
      [](const DemoSet& s, const std::string& file) { save_demoset(s, file); },
      py::arg("demos"), py::arg("file"));

  // Batched rewards over a demo set.
  m.def(
      "batch_dtw_reward",
      [](const PyPoints& window, const DemoSet& demos) {
        const BatchReward r = batch_dtw_reward(to_path(window), demos);
        return py::make_tuple(r.reward, r.best_demo);
      },
      py::arg("window"), py::arg("demos"),
      "(reward, best_demo) for the best window-to-segment match.");
  m.def(
      "batch_signature_reward",
      [](const PyPoints& path, const DemoSet& demos, int level) {
        const BatchReward r = batch_signature_reward(to_path(path), demos,
                                                     level);
        return py::make_tuple(r.reward, r.best_demo);
      },
      py::arg("path"), py::arg("demos"), py::arg("level"));
  m.def(
      "batch_state_reward",
      [](const std::array<double, 3>& pos, const DemoSet& demos) {
        const BatchReward r = batch_state_reward(to_vec(pos), demos);
        return py::make_tuple(r.reward, r.best_demo);
      },
      py::arg("pos"), py::arg("demos"));

  // Curriculum.
  py::class_<CurriculumConfig>(m, "CurriculumConfig")
      .def(py::init<>())
      .def_readwrite("num_stages", &CurriculumConfig::num_stages)
      .def_readwrite("height_min_initial", &CurriculumConfig::height_min_initial)
      .def_readwrite("height_min_final", &CurriculumConfig::height_min_final)
      .def_readwrite("height_max", &CurriculumConfig::height_max)
      .def_readwrite("window", &CurriculumConfig::window)
      .def_readwrite("advance_threshold", &CurriculumConfig::advance_threshold);

  py::class_<CurriculumState>(m, "Curriculum",
                              "Staged schedule over initial spawn heights.")
      .def_readonly("stage", &CurriculumState::stage)
      .def("lower_bound",
           [](const CurriculumState& s) { return stage_lower_bound(s); })
      .def("weight",
           [](const CurriculumState& s) { return curriculum_weight(s); })
      .def(
          "sample_height",
          [](const CurriculumState& s, Rng& rng) {
            return sample_initial_height(s, rng);
          },
          py::arg("rng"))
      .def(
          "record",
          [](CurriculumState& s, bool success) {
            s = record_and_maybe_advance(std::move(s), success);
            return s.stage;
          },
          py::arg("success"),
          "Record one episode outcome; returns the (possibly advanced) "
          "stage.");

  m.def(
      "make_curriculum",
      [](std::optional<CurriculumConfig> cfg) {
        return make_curriculum(cfg.value_or(CurriculumConfig{}));
      },
      py::arg("config") = std::nullopt);

  // Episodes.
  m.def(
      "run_episode",
      [](const DemoSet& demos, const std::string& scheme, std::uint64_t seed,
         std::optional<CurriculumState> curriculum) {
        Rng rng(seed);
        const EpisodeResult r =
            run_episode(EnvConfig{}, demos, scheme_or_throw(scheme),
                        RewardConfig{}, rng,
                        curriculum ? &*curriculum : nullptr);
        py::dict d;
        d["success"] = r.success;
        d["steps"] = r.steps_taken;
        d["episode_return"] = r.episode_return;
        d["trace"] = from_path(r.trace);
        return d;
      },
      py::arg("demos"), py::arg("scheme"), py::arg("seed"),
      py::arg("curriculum") = std::nullopt,
      "One greedy-controller episode; demos are socket-frame as generated.");
  m.def(
      "compare_schemes",
      [](const DemoSet& demos, const std::vector<std::string>& schemes,
         std::size_t episodes, std::uint64_t seed) {
        std::vector<Scheme> parsed;
        parsed.reserve(schemes.size());
        for (const std::string& s : schemes) parsed.push_back(scheme_or_throw(s));
        const auto reports = compare_schemes(EnvConfig{}, demos,
                                             RewardConfig{}, parsed, episodes,
                                             seed);
        py::list out;
        for (const SchemeReport& r : reports) out.append(report_dict(r));
        return out;
      },
      py::arg("demos"), py::arg("schemes"), py::arg("episodes"),
      py::arg("seed"),
      "Success-rate comparison across reward schemes on a shared episode "
      "seed stream.");
}
