#include "c2b/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numeric>
#include <utility>

#include "c2b/model.hpp"
#include "c2b/rng.hpp"
#include "c2b/tape.hpp"

namespace c2b {

namespace {

using TapeD = TapeT<double>;
using TensorD = TensorT<double>;
using Id = TapeD::Id;

// Inputs are listed explicitly so the runner can perturb every tensor that
// carries a gradient. The builder must be a pure function of the tape and
// the input ids: it runs once for the analytic pass and twice per sampled
// coordinate for the central differences.
struct CheckSpec {
  std::string name;
  double tolerance = 1e-4;
  std::vector<TensorD> inputs;
  std::function<Id(TapeD&, const std::vector<Id>&)> build;
  // Multiplies the analytic gradient before comparison. Anything but 1
  // simulates a corrupted backward pass for the negative control.
  double analytic_scale = 1.0;
  bool expect_failure = false;
};

TensorD uniform_tensor(Rng& rng, int b, int c, int h, int w, double lo, double hi) {
  TensorD t(b, c, h, w);
  for (double& v : t.data) v = lo + (hi - lo) * rng.next_double();
  return t;
}

// Magnitude in [lo, hi] with a random sign: keeps values away from the kink
// at zero so relu-style subgradients are numerically checkable.
TensorD signed_band(Rng& rng, int b, int c, int h, int w, double lo, double hi) {
  TensorD t(b, c, h, w);
  for (double& v : t.data) {
    const double mag = lo + (hi - lo) * rng.next_double();
    v = rng.next_double() < 0.5 ? -mag : mag;
  }
  return t;
}

// Shuffled distinct multiples of gap: any two entries differ by at least
// gap, so max pools and neighbor differences never sit on a tie.
TensorD spaced_values(Rng& rng, int b, int c, int h, int w, double gap) {
  TensorD t(b, c, h, w);
  const int n = static_cast<int>(t.numel());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (int i = 0; i < n; ++i) t.data[i] = gap * (perm[i] - n / 2);
  return t;
}

TensorD sign_probe(Rng& rng, int b, int c, int h, int w) {
  TensorD t(b, c, h, w);
  for (double& v : t.data) v = rng.next_double() < 0.5 ? -1.0 : 1.0;
  return t;
}

double eval_loss(const CheckSpec& spec, const std::vector<TensorD>& inputs) {
  TapeD tape;
  std::vector<Id> ids;
  ids.reserve(inputs.size());
  for (const TensorD& in : inputs) ids.push_back(tape.leaf(in));
  return tape.value(spec.build(tape, ids)).data[0];
}

GradCheckResult run_spec(const CheckSpec& spec, uint64_t seed, uint64_t index) {
  GradCheckResult result;
  result.name = spec.name;
  result.tolerance = spec.tolerance;
  result.expect_failure = spec.expect_failure;

  std::vector<TensorD> analytic;
  {
    TapeD tape;
    std::vector<Id> ids;
    ids.reserve(spec.inputs.size());
    for (const TensorD& in : spec.inputs) ids.push_back(tape.leaf(in));
    const Id loss = spec.build(tape, ids);
    tape.backward(loss);
    for (Id id : ids) analytic.push_back(tape.grad(id));
  }

  // Spread at least 20 coordinates across the inputs; tiny tensors (biases)
  // contribute everything they have and the rest absorb the remainder.
  size_t widest = 0;
  for (const TensorD& in : spec.inputs) widest = std::max(widest, in.numel());
  const auto planned = [&](size_t k) {
    size_t total = 0;
    for (const TensorD& in : spec.inputs) total += std::min(in.numel(), k);
    return total;
  };
  size_t per_input = (20 + spec.inputs.size() - 1) / spec.inputs.size();
  while (planned(per_input) < 20 && per_input < widest) ++per_input;

  std::vector<TensorD> work = spec.inputs;
  for (size_t i = 0; i < spec.inputs.size(); ++i) {
    const size_t n = spec.inputs[i].numel();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng = Rng::split(seed, 0x6c0de + index, i);
    rng.shuffle(order);
    const size_t count = std::min(n, per_input);
    for (size_t s = 0; s < count; ++s) {
      const size_t j = order[s];
      const double x = spec.inputs[i].data[j];
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      work[i].data[j] = x + h;
      const double up = eval_loss(spec, work);
      work[i].data[j] = x - h;
      const double down = eval_loss(spec, work);
      work[i].data[j] = x;
      const double numeric = (up - down) / (2.0 * h);
      const double a = spec.analytic_scale * analytic[i].data[j];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      result.max_rel_error = std::max(result.max_rel_error, rel);
      ++result.coords_checked;
    }
  }
  result.passed = result.max_rel_error <= spec.tolerance;
  return result;
}

std::vector<CheckSpec> make_specs(uint64_t seed, bool include_negative_control) {
  std::vector<CheckSpec> specs;
  const auto rng_for = [seed](uint64_t key) { return Rng::split(seed, 0x9cad, key); };

  {
    Rng rng = rng_for(1);
    CheckSpec s;
    s.name = "conv2d";
    s.inputs.push_back(uniform_tensor(rng, 1, 3, 6, 6, -1.0, 1.0));
    s.inputs.push_back(uniform_tensor(rng, 4, 3, 3, 3, -1.0, 1.0));
    s.inputs.push_back(uniform_tensor(rng, 1, 4, 1, 1, -0.5, 0.5));
    TensorD probe = sign_probe(rng, 1, 4, 6, 6);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.conv2d(ids[0], ids[1], ids[2], 1, 1), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(2);
    CheckSpec s;
    s.name = "conv2d-strided";
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 6, 6, -1.0, 1.0));
    s.inputs.push_back(uniform_tensor(rng, 3, 2, 2, 2, -1.0, 1.0));
    s.inputs.push_back(uniform_tensor(rng, 1, 3, 1, 1, -0.5, 0.5));
    TensorD probe = sign_probe(rng, 1, 3, 3, 3);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.conv2d(ids[0], ids[1], ids[2], 2, 0), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(3);
    CheckSpec s;
    s.name = "relu";
    s.inputs.push_back(signed_band(rng, 1, 2, 4, 4, 0.1, 1.0));
    TensorD probe = sign_probe(rng, 1, 2, 4, 4);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.relu(ids[0]), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(4);
    CheckSpec s;
    s.name = "maxpool2";
    s.inputs.push_back(spaced_values(rng, 1, 2, 4, 4, 0.011));
    TensorD probe = sign_probe(rng, 1, 2, 2, 2);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.maxpool2(ids[0]), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(5);
    CheckSpec s;
    s.name = "upsample2";
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 4, 4, -1.0, 1.0));
    TensorD probe = sign_probe(rng, 1, 2, 8, 8);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.upsample2(ids[0]), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(6);
    CheckSpec s;
    s.name = "concat";
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 3, 3, -1.0, 1.0));
    s.inputs.push_back(uniform_tensor(rng, 1, 3, 3, 3, -1.0, 1.0));
    TensorD probe = sign_probe(rng, 1, 5, 3, 3);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.concat_channels(ids[0], ids[1]), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(7);
    CheckSpec s;
    s.name = "cosine";
    s.inputs.push_back(signed_band(rng, 1, 4, 3, 3, 0.3, 1.0));
    s.inputs.push_back(signed_band(rng, 1, 4, 3, 3, 0.3, 1.0));
    TensorD probe = sign_probe(rng, 1, 1, 3, 3);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.cosine_channels(ids[0], ids[1]), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(8);
    CheckSpec s;
    s.name = "broadcast-mul";
    s.inputs.push_back(uniform_tensor(rng, 1, 1, 3, 3, 0.2, 1.0));
    s.inputs.push_back(uniform_tensor(rng, 1, 3, 3, 3, -1.0, 1.0));
    TensorD probe = sign_probe(rng, 1, 3, 3, 3);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.broadcast_mul(ids[0], ids[1]), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(9);
    CheckSpec s;
    s.name = "subpixel";
    s.inputs.push_back(uniform_tensor(rng, 1, 8, 2, 2, -1.0, 1.0));
    TensorD probe = sign_probe(rng, 1, 2, 4, 4);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.subpixel_upsample(ids[0], 2), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(10);
    CheckSpec s;
    s.name = "l1-loss";
    TensorD target = uniform_tensor(rng, 1, 2, 4, 4, 0.0, 1.0);
    TensorD pred = target;
    // Differences stay above 0.01, far from the kink relative to the step.
    for (double& v : pred.data) {
      const double off = 0.01 + 0.2 * rng.next_double();
      v += rng.next_double() < 0.5 ? -off : off;
    }
    s.inputs.push_back(std::move(pred));
    s.inputs.push_back(std::move(target));
    s.build = [](TapeD& t, const std::vector<Id>& ids) {
      return t.l1_loss(ids[0], ids[1]);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(11);
    CheckSpec s;
    s.name = "tv-l1";
    s.inputs.push_back(spaced_values(rng, 1, 2, 4, 4, 0.011));
    s.build = [](TapeD& t, const std::vector<Id>& ids) { return t.tv_l1(ids[0]); };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(12);
    CheckSpec s;
    s.name = "affine";
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 4, 4, -1.0, 1.0));
    TensorD probe = sign_probe(rng, 1, 2, 4, 4);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.affine(ids[0], 1.7, -0.3), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(13);
    CheckSpec s;
    s.name = "scale-add";
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 3, 3, -1.0, 1.0));
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 3, 3, -1.0, 1.0));
    TensorD probe = sign_probe(rng, 1, 2, 3, 3);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.scale_add(ids[0], 1.3, ids[1], -0.7), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(14);
    CheckSpec s;
    s.name = "saturate01";
    // Interior points only: at the clamp boundary the pass-through gradient
    // intentionally disagrees with the true (zero) derivative.
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 4, 4, 0.05, 0.95));
    TensorD probe = sign_probe(rng, 1, 2, 4, 4);
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.saturate01(ids[0]), probe);
    };
    specs.push_back(std::move(s));
  }
  {
    Rng rng = rng_for(15);
    ModelConfig cfg;
    cfg.variant = ModelVariant::kPair;
    cfg.frames = 9;
    cfg.tile = 3;
    cfg.unet_widths = {4, 6, 8};
    cfg.bottleneck = 12;
    auto model = std::make_shared<FusionModelT<double>>(
        cfg, Rng::split(seed, 0xe2e).next_u64());

    CheckSpec s;
    s.name = "model-pair-loss";
    s.tolerance = 1e-3;
    for (const auto& p : model->params()) s.inputs.push_back(p.value);
    TensorD xc = uniform_tensor(rng, 1, 9, 8, 8, 0.0, 1.0);
    TensorD xf = uniform_tensor(rng, 1, 9, 8, 8, 0.0, 1.0);
    TensorD target = uniform_tensor(rng, 1, 9, 24, 24, 0.0, 1.0);
    s.build = [model, xc, xf, target](TapeD& t, const std::vector<Id>& ids) {
      const Id xc_id = t.leaf(xc);
      const Id xf_id = t.leaf(xf);
      const auto fwd = model->forward_pair(t, ids, xc_id, xf_id);
      const Id data_term = t.l1_loss(fwd.prediction, t.leaf(target));
      const Id smooth_term = t.tv_l1(fwd.prediction);
      return t.scale_add(data_term, 1.0, smooth_term, 0.1);
    };
    specs.push_back(std::move(s));
  }

  if (include_negative_control) {
    Rng rng = rng_for(99);
    CheckSpec s;
    s.name = "negative-control";
    s.inputs.push_back(uniform_tensor(rng, 1, 2, 4, 4, -1.0, 1.0));
    TensorD probe = sign_probe(rng, 1, 2, 4, 4);
    s.analytic_scale = 1.01;
    s.expect_failure = true;
    s.build = [probe](TapeD& t, const std::vector<Id>& ids) {
      return t.inner(t.affine(ids[0], 1.7, -0.3), probe);
    };
    specs.push_back(std::move(s));
  }

  return specs;
}

}  // namespace

std::vector<GradCheckResult> run_gradient_checks(uint64_t seed, bool include_negative_control) {
  const std::vector<CheckSpec> specs = make_specs(seed, include_negative_control);
  std::vector<GradCheckResult> results;
  results.reserve(specs.size());
  for (size_t i = 0; i < specs.size(); ++i) {
    results.push_back(run_spec(specs[i], seed, i));
  }
  return results;
}

bool all_behaved(const std::vector<GradCheckResult>& results) {
  for (const GradCheckResult& r : results) {
    if (!r.behaved()) return false;
  }
  return !results.empty();
}

std::string format_gradcheck_report(const std::vector<GradCheckResult>& results) {
  std::string out;
  char line[192];
  for (const GradCheckResult& r : results) {
    const char* note = "";
    if (r.expect_failure) {
      note = r.behaved() ? "  (corrupted on purpose; failing is correct)"
                         : "  (corruption went undetected)";
    }
    std::snprintf(line, sizeof line, "[%s] %-16s max rel error %9.3e  coords %3d  tol %7.1e%s\n",
                  r.passed ? " OK " : "FAIL", r.name.c_str(), r.max_rel_error, r.coords_checked,
                  r.tolerance, note);
    out += line;
  }
  return out;
}

}  // namespace c2b
