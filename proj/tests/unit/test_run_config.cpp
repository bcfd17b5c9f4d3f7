#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <mpw/run_config.hpp>

using namespace mpw;

TEST_CASE("config text parses forgiving keys and comments") {
  const std::string text =
      "# two species, strong boson pairing\n"
      "N-F = 6\n"
      "nb=6\n"
      "eps_f = 5.0   # trailing comment\n"
      "EPS_B = 5.0\n"
      "vf = -0.4\n"
      "v_b = -2\n"
      "mu = 0.5\n"
      "\n"
      "solver = column\n"
      "tol = 1e-9\n"
      "max-iter = 200\n"
      "seed = 42\n"
      "out = run.csv\n"
      "axis = mu=0:1:0.1\n"
      "axis = v_f=-1:0:0.5\n"
      "retry_failed = yes\n";
  const RunConfig c = parse_config_text(text, "inline");
  CHECK(c.n_f == 6);
  CHECK(c.n_b == 6);
  CHECK(c.eps_f == 5.0);
  CHECK(c.eps_b == 5.0);
  CHECK(c.v_f == -0.4);
  CHECK(c.v_b == -2.0);
  CHECK(c.mu == 0.5);
  CHECK(c.solver == std::string("column"));
  CHECK(c.tol == 1e-9);
  CHECK(c.max_iter == 200);
  CHECK(c.seed == 42);
  CHECK(c.out == std::string("run.csv"));
  REQUIRE(c.axes.size() == 2);
  CHECK(c.axes[0] == "mu=0:1:0.1");
  CHECK(c.retry_failed == true);
}

TEST_CASE("typos are an error, with the line number") {
  try {
    parse_config_text("n_f = 2\nnn_f = 3\n", "conf");
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("conf:2") != std::string::npos);
    CHECK(msg.find("nn_f") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config_text("n_f\n", "conf"), ParameterError);
  CHECK_THROWS_AS(parse_config_text("n_f =\n", "conf"), ParameterError);
  CHECK_THROWS_AS(parse_config_text("n_f = two\n", "conf"), ParameterError);
  CHECK_THROWS_AS(parse_config_text("tol = 1e-\n", "conf"), ParameterError);
  CHECK_THROWS_AS(parse_config_text("retry_failed = maybe\n", "conf"), ParameterError);
}

TEST_CASE("flags layer over the config file") {
  RunConfig file;
  file.n_f = 4;
  file.v_f = -0.5;
  file.solver = "full";
  file.axes = {"mu=0:1:0.5"};

  RunConfig flags;
  flags.v_f = -1.0;
  flags.tol = 1e-8;
  flags.axes = {"v_f=-1:0:0.1", "mu=0:1:0.1"};

  const RunConfig merged = merge_configs(file, flags);
  CHECK(merged.n_f == 4);         // kept from the file
  CHECK(merged.v_f == -1.0);      // overridden
  CHECK(merged.tol == 1e-8);      // introduced
  CHECK(merged.solver == std::string("full"));
  CHECK(merged.axes.size() == 2);  // axes replace wholesale

  const RunConfig keep = merge_configs(file, RunConfig{});
  CHECK(keep.axes.size() == 1);
  CHECK(keep.v_f == -0.5);
}

TEST_CASE("render and parse are inverse on the canonical form") {
  RunConfig c;
  c.n_f = 6;
  c.n_b = 6;
  c.eps_f = 3.0;
  c.v_f = -0.08;
  c.mu = 0.25;
  c.solver = "collective";
  c.tol = 1e-10;
  c.max_iter = 400;
  c.seed = 99;
  c.out = "w.jsonl";
  c.axes = {"mu=0:1:0.02"};
  c.retry_failed = false;

  const RunConfig back = parse_config_text(render_config(c), "render");
  CHECK(back.n_f == c.n_f);
  CHECK(back.n_b == c.n_b);
  CHECK(back.eps_f == c.eps_f);
  CHECK(back.v_f == c.v_f);
  CHECK(back.mu == c.mu);
  CHECK(back.solver == c.solver);
  CHECK(back.tol == c.tol);
  CHECK(back.max_iter == c.max_iter);
  CHECK(back.seed == c.seed);
  CHECK(back.out == c.out);
  CHECK(back.axes == c.axes);
  CHECK(back.retry_failed == c.retry_failed);
  CHECK_FALSE(back.eps_b.has_value());
}

TEST_CASE("config files come from disk with their own name in errors") {
  const auto path = (std::filesystem::temp_directory_path() / "mpw_conf_test.cfg").string();
  {
    std::ofstream out(path);
    out << "n_f = 3\nbogus = 1\n";
  }
  try {
    parse_config_file(path);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find(path + ":2") != std::string::npos);
  }
  std::remove(path.c_str());

  CHECK_THROWS_AS(parse_config_file("/nonexistent/mpw.cfg"), ParameterError);
}

TEST_CASE("axis strings parse both forms") {
  const AxisSpec three = parse_axis("mu=0:1:0.25");
  CHECK(three.name == "mu");
  CHECK(three.start == 0.0);
  CHECK(three.stop == 1.0);
  CHECK(three.step == 0.25);
  CHECK(three.count() == 5);

  const AxisSpec pin = parse_axis("V-F = -0.4");
  CHECK(pin.name == "v_f");
  CHECK(pin.start == -0.4);
  CHECK(pin.stop == -0.4);
  CHECK(pin.count() == 1);

  CHECK_THROWS_AS(parse_axis("mu"), ParameterError);
  CHECK_THROWS_AS(parse_axis("mu=0:1"), ParameterError);
  CHECK_THROWS_AS(parse_axis("mu=0:1:0.1:9"), ParameterError);
  CHECK_THROWS_AS(parse_axis("phi=0:1:0.1"), ParameterError);
  CHECK_THROWS_AS(parse_axis("mu=0:1:-0.1"), ParameterError);
}

TEST_CASE("engine inputs resolve with documented defaults") {
  RunConfig c;
  const SystemParams p = params_from(c);
  CHECK(p.n_f == 0);
  CHECK(p.eps_f == 1.0);
  CHECK(p.mu == 0.0);

  const SolveOptions o = solve_options_from(c);
  CHECK(o.tolerance == 1e-10);
  CHECK(o.max_iterations == 500);
  CHECK(solver_path_from(c) == SolverPath::Column);

  c.solver = "Collective";
  CHECK(solver_path_from(c) == SolverPath::Collective);
  c.solver = "FULL";
  CHECK(solver_path_from(c) == SolverPath::Full);
  c.solver = "hybrid";
  CHECK_THROWS_AS(solver_path_from(c), ParameterError);

  c.tol = -1.0;
  CHECK_THROWS_AS(solve_options_from(c), ParameterError);
  c.tol = 1e-6;
  c.max_iter = 0;
  CHECK_THROWS_AS(solve_options_from(c), ParameterError);
}
