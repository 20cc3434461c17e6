#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pinnss/experiment.hpp"

#include <string>

using namespace pinnss;

TEST_CASE("a full config file parses into the expected fields") {
  std::string text = R"(# benchmark setup
problem = fisher
x_lo = -20
x_hi = 80
t_lo = 0
t_hi = 30

hidden_layers = 3
neurons = 40
epochs = 20000          # split one fifth / four fifths

eta_high = 2e-3
eta_low = 2e-4
grad_threshold = 5e-4
density = 0.8
epsilon = 1e-4
n_slabs = 25
derivative_order = 2
radius_mode = literal
resample_every = 4
eval_stride = 250
eval_nx = 101
eval_nt = 51
seeds = 1, 2, 3
sampler = both
out = results/fisher
checkpoint_stride = 1000
threads = 2
)";
  auto cfg = parse_config_text(text, "inline");
  CHECK(cfg.problem == "fisher");
  CHECK(cfg.domain.x_lo == -20);
  CHECK(cfg.domain.t_hi == 30);
  CHECK(cfg.neurons == std::vector<int>{40, 40, 40});
  CHECK(cfg.stage1_epochs == 4000);
  CHECK(cfg.stage2_epochs == 16000);
  CHECK(cfg.train.eta_high == 2e-3);
  CHECK(cfg.train.eta_low == 2e-4);
  CHECK(cfg.train.grad_threshold == 5e-4);
  CHECK(cfg.train.sampler.density == 0.8);
  CHECK(cfg.train.sampler.epsilon == 1e-4);
  CHECK(cfg.train.sampler.n_slabs == 25);
  CHECK(cfg.train.sampler.derivative_order == 2);
  CHECK(cfg.train.sampler.radius_mode == RadiusMode::literal);
  CHECK(cfg.train.resample_every == 4);
  CHECK(cfg.train.eval_stride == 250);
  CHECK(cfg.train.eval_nx == 101);
  CHECK(cfg.train.eval_nt == 51);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.sampler_choice == SamplerChoice::both);
  CHECK(cfg.out_dir == "results/fisher");
  CHECK(cfg.checkpoint_stride == 1000);
  CHECK(cfg.threads == 2);
}

TEST_CASE("defaults survive an empty config") {
  auto cfg = parse_config_text("", "inline");
  CHECK(cfg.problem == "advection");
  CHECK(cfg.neurons == std::vector<int>{20, 20, 20});
  CHECK(cfg.train.sampler.radius_mode == RadiusMode::lemma);
  CHECK(cfg.sampler_choice == SamplerChoice::stratified);
}

TEST_CASE("a neurons list sets per-layer widths") {
  auto cfg = parse_config_text("neurons = 30, 20, 10\n", "inline");
  CHECK(cfg.neurons == std::vector<int>{30, 20, 10});
  CHECK_THROWS(parse_config_text("hidden_layers = 2\nneurons = 30, 20, 10\n", "inline"));
}

TEST_CASE("parse errors carry the file name and line number") {
  CHECK_THROWS_WITH_AS(parse_config_text("problem = advection\nwidgets = 7\n", "my.cfg"),
                       doctest::Contains("my.cfg:2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("\n\nx_lo = fast\n", "my.cfg"),
                       doctest::Contains("my.cfg:3"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("just a line\n", "my.cfg"),
                       doctest::Contains("my.cfg:1"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_file("no_such_config_anywhere.cfg"), std::runtime_error);
}

TEST_CASE("epochs and explicit stage counts are mutually exclusive") {
  CHECK_THROWS_WITH_AS(parse_config_text("epochs = 100\nstage1_epochs = 10\n", "inline"),
                       doctest::Contains("not both"), std::runtime_error);
  auto cfg = parse_config_text("stage1_epochs = 10\nstage2_epochs = 90\n", "inline");
  CHECK(cfg.stage1_epochs == 10);
  CHECK(cfg.stage2_epochs == 90);
}

TEST_CASE("semantic validation still applies after parsing") {
  CHECK_THROWS(parse_config_text("x_lo = 5\nx_hi = -5\n", "inline"));
  CHECK_THROWS(parse_config_text("problem = burgers\n", "inline"));
  CHECK_THROWS(parse_config_text("epsilon = 0.9\n", "inline"));
}

TEST_CASE("format_config round-trips through the parser") {
  auto cfg = parse_config_text(
      "problem = zeldovich\nneurons = 12, 8\nepochs = 500\nseeds = 4 5\nsampler = classical\n",
      "inline");
  auto again = parse_config_text(format_config(cfg), "roundtrip");
  CHECK(again.problem == cfg.problem);
  CHECK(again.neurons == cfg.neurons);
  CHECK(again.stage1_epochs == cfg.stage1_epochs);
  CHECK(again.stage2_epochs == cfg.stage2_epochs);
  CHECK(again.seeds == cfg.seeds);
  CHECK(again.sampler_choice == cfg.sampler_choice);
  CHECK(again.train.sampler.density == cfg.train.sampler.density);
}
