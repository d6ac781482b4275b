#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "spec_gen.hpp"
#include "support.hpp"
#include "wordstream/builder.hpp"
#include "wordstream/cli.hpp"
#include "wordstream/errors.hpp"
#include "wordstream/formats.hpp"
#include "wordstream/group_spec.hpp"
#include "wordstream/harness.hpp"

using namespace wordstream;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string data_dir() { return testing::data_path(""); }

BuildConfig data_config() {
  BuildConfig cfg;
  cfg.base_dir = data_dir();
  return cfg;
}

}  // namespace

TEST_CASE("parser: examples") {
  auto a = parse_group_spec("wr(Z, fp(Z, Z))");
  CHECK(a.kind == GroupSpec::Kind::wr);
  REQUIRE(a.lamps.size() == 1);
  CHECK(a.lamps[0].kind == GroupSpec::Kind::Z);
  CHECK(a.children.at(0).kind == GroupSpec::Kind::fp);
  CHECK(a.children[0].children.size() == 2);

  auto b = parse_group_spec("wr(Z, wr(Z, Z))");
  CHECK(b.children.at(0).kind == GroupSpec::Kind::wr);
  CHECK(b.children[0].children.at(0).kind == GroupSpec::Kind::Z);

  try {
    parse_group_spec("wr(free(2), Z)");
    FAIL("non-abelian lamp accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("non-abelian lamp") != std::string::npos);
    CHECK(e.line() == 1);
    CHECK(e.column() == 4);
  }

  auto c = parse_group_spec("  UT( 4 ,\n \"dir/file name.mat\" , 3 ) ");
  CHECK(c.ints == std::vector<std::uint64_t>{4});
  CHECK(c.file == "dir/file name.mat");
  CHECK(c.c == 3u);
  CHECK(parse_group_spec("matrix(gens.mat)").file == "gens.mat");
  CHECK(parse_group_spec("Z^3").ints == std::vector<std::uint64_t>{3});
  CHECK(parse_group_spec("wr([Z^2, Zmod(9)], Z)").lamps.size() == 2);
}

TEST_CASE("parser: printed ASTs reparse to the same tree") {
  Rng r(2024);
  for (int i = 0; i < 10000; ++i) {
    GroupSpec g = testing::random_spec(r, static_cast<unsigned>(r.below(5)));
    const std::string text = print_group_spec(g);
    GroupSpec back = parse_group_spec(text);
    REQUIRE_MESSAGE(back == g, text);
    CHECK(print_group_spec(back) == text);
    CHECK(parse_group_spec(testing::scatter_whitespace(text, r)) == g);
  }
}

TEST_CASE("parser: malformed inputs carry a location") {
  for (const auto& m : testing::malformed_inputs()) {
    CAPTURE(m.text);
    try {
      parse_group_spec(m.text);
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(e.line() == m.line);
      CHECK(e.column() == m.column);
      CHECK(std::string(e.what()).rfind(std::to_string(m.line) + ":" + std::to_string(m.column) + ": ", 0) == 0);
    }
  }
}

TEST_CASE("word files") {
  FreeAbelianGroup z(1u);
  auto words = parse_words(read_text_file(testing::data_path("words_z.txt")), z.alphabet());
  REQUIRE(words.size() == 4);
  CHECK(words[0].size() == 2);
  CHECK(words[2].empty());
  CHECK(words[3] == z.alphabet().parse_word("a- a- a a"));
  try {
    parse_words("a\na b\n", z.alphabet());
    FAIL("unknown letter accepted");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).rfind("line 2: ", 0) == 0);
  }
  CHECK_THROWS_AS(read_text_file(testing::data_path("missing.txt")), FormatError);
}

TEST_CASE("matrix files") {
  auto heis = parse_matrix_file(read_text_file(testing::data_path("heis.mat")));
  CHECK(heis.dim == 3);
  CHECK(heis.alphabet->names() == std::vector<std::string>{"x", "y"});
  MatrixGroup h(heis);
  CHECK(h.is_identity(h.evaluate(h.alphabet().parse_word("x y x- y- x y x y- x- x-"))));
  CHECK_FALSE(h.is_identity(h.evaluate(h.alphabet().parse_word("x y x- y-"))));

  auto aff = parse_matrix_file(read_text_file(testing::data_path("affine_x.mat")));
  CHECK(aff.vars == 1);
  MatrixGroup a(aff);
  CHECK(a.is_identity(a.evaluate(a.alphabet().parse_word("g h g- h g h- g- h-"))));
  CHECK_FALSE(a.is_identity(a.evaluate(a.alphabet().parse_word("g h g- h-"))));

  auto expect_line = [](const std::string& text, const std::string& prefix) {
    CAPTURE(text);
    try {
      parse_matrix_file(text);
      FAIL("accepted");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(prefix) != std::string::npos);
    }
  };
  expect_line("dim 2\ngen a\n1 0\n0\n", "line 4: ");
  expect_line("dim 2\ngen a\n1 0\n0 1:1\n", "line 4: ");
  expect_line("dim 2; colour 3\n", "line 1: ");
  expect_line("dim 2\nbogus a\n", "line 2: ");
  expect_line("vars 0\ngen a\n1\n", "missing 'dim'");
  expect_line("dim 2\ngen a\n1 1\n1 1\n", "singular");
  // [[2,0],[0,1]] has no integer inverse.
  expect_line("dim 2\ngen a\n2 0\n0 1\n", "explicitly");
}

TEST_CASE("finite tables") {
  auto s3 = parse_finite_table(read_text_file(testing::data_path("s3.table")));
  CHECK(s3->order() == 6);
  const auto& al = s3->alphabet();
  CHECK(al.names() == std::vector<std::string>{"x", "y"});
  CHECK(s3->equal(s3->evaluate(al.parse_word("x y x")), s3->evaluate(al.parse_word("y x y"))));
  CHECK_FALSE(s3->equal(s3->evaluate(al.parse_word("x y")), s3->evaluate(al.parse_word("y x"))));
  CHECK(s3->is_identity(s3->evaluate(al.parse_word("x y x y x y"))));

  auto expect = [](const std::string& text, const std::string& piece) {
    CAPTURE(text);
    try {
      parse_finite_table(text);
      FAIL("accepted");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(piece) != std::string::npos);
    }
  };
  expect("e a\ne a\na q\n", "line 3: ");
  expect("e a\ne a\na\n", "line 3: ");
  expect("e a\ne a\na a\n", "finite table");
  expect("e a\ne a\na e\ngens b\n", "line 4: ");
  expect("e e\n", "line 1: ");
  expect("", "empty");
}

TEST_CASE("extension files") {
  auto base = std::make_shared<const Alphabet>(std::vector<std::string>{"a"});
  auto file = parse_extension_file(read_text_file(testing::data_path("dinf_ext.txt")), base);
  CHECK(file.oracle_matrix_file == std::optional<std::string>("dinf_oracle.mat"));
  CHECK(file.data.cosets() == 2);
  CHECK(file.data.alpha[1][1] == 0);
  CHECK(file.data.conj[0][1] == base->parse_word("a-"));
  MatrixGroup big(parse_matrix_file(read_text_file(testing::data_path("dinf_oracle.mat"))));
  CHECK_NOTHROW(file.data.verify(big));

  auto expect = [&](const std::string& text, const std::string& piece) {
    CAPTURE(text);
    try {
      parse_extension_file(text, base);
      FAIL("accepted");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(piece) != std::string::npos);
    }
  };
  expect("conj a 1 : a\n", "line 1: ");
  expect("cosets s\nconj a 2 : a-\nalpha 2 2 = 3\nmult 2 2 :\n", "line 3: ");
  expect("cosets s\nconj b 2 : a-\n", "line 2: ");
  expect("cosets s\nconj a 2 : a-\nalpha 2 2 = 1\n", "missing 'mult 2 2'");
  expect("cosets s\nconj a 2 : a-\nalpha 2 2 = 1\nmult 2 2 :\nfrobnicate\n", "line 5: ");
  expect("cosets s\nconj a 2 : q\nalpha 2 2 = 1\nmult 2 2 :\n", "line 2: ");
}

TEST_CASE("generator maps") {
  FreeGroup f2(2u);
  auto m = parse_generator_map(read_text_file(testing::data_path("f2_swap.map")), f2.alphabet());
  CHECK(m.alphabet->names() == std::vector<std::string>{"u", "v"});
  CHECK(m.images[0] == f2.alphabet().parse_word("a b"));
  try {
    parse_generator_map("u = a\nv a\n", f2.alphabet());
    FAIL("accepted");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).rfind("line 2: ", 0) == 0);
  }
  CHECK_THROWS_AS(parse_generator_map("u = c\n", f2.alphabet()), FormatError);
  CHECK_THROWS_AS(parse_generator_map("# nothing\n", f2.alphabet()), FormatError);
}

TEST_CASE("builder covers every constructor") {
  const std::vector<std::string> specs = {"Z",
                                          "Z^2",
                                          "Zmod(5)",
                                          "free(2)",
                                          "matrix(affine_x.mat)",
                                          "matrix(heis.mat, 2)",
                                          "UT(3, heis.mat)",
                                          "heisenberg",
                                          "grigorchuk",
                                          "finite(s3.table)",
                                          "dihedral_inf",
                                          "dp(Z, free(2))",
                                          "fp(Z, Z)",
                                          "wr(Z, Z)",
                                          "wr([Z, Zmod(4)], Z)",
                                          "wr(Zmod(2), finite(s3.table))",
                                          "wr(Zmod(3), Zmod(4))",
                                          "ext(dinf_ext.txt, Z)",
                                          "regen(f2_swap.map, free(2))"};
  const unsigned n = 16;
  for (const auto& s : specs) {
    CAPTURE(s);
    BuiltGroup b = build_group(s, data_config());
    REQUIRE(b.recipe);
    REQUIRE(b.oracle);
    CHECK(b.oracle->alphabet() == *b.recipe->alphabet());
    Rng r(std::hash<std::string>{}(s));
    auto machine = init(*b.recipe, n, 3);
    std::size_t missed = 0, wrong = 0;
    for (int i = 0; i < 40; ++i) {
      Word w = random_word(*b.recipe->alphabet(), r.below(n / 2 + 1), r);
      machine->reset();
      missed += !decide_identity(*machine, concat(w, inverse(w))).accept;
      machine->reset();
      wrong += decide_identity(*machine, w).accept != b.oracle->is_identity(b.oracle->evaluate(w));
    }
    CHECK(missed == 0);
    CHECK(wrong <= 2);
  }
  BuildConfig exact = data_config();
  exact.exact_top = true;
  auto ring = build_group("wr(Zmod(4), Z)", exact);
  const auto& wr = dynamic_cast<const WreathAbelianRecipe&>(*ring.recipe);
  CHECK(dynamic_cast<const ExactBallRecipe*>(wr.inner().get()) != nullptr);
  CHECK(ring.recipe->epsilon(100) == doctest::Approx(0.05));
  CHECK(cli({"estimate", "--group", "wr(Zmod(4), Z)", "--exact-top", "--n", "50", "--trials", "100"}).code == kExitOk);
  CHECK_THROWS_AS(build_group("matrix(missing.mat)", data_config()), FormatError);
  CHECK_THROWS_AS(build_group("UT(4, heis.mat)", data_config()), FormatError);
  CHECK_THROWS_AS(build_group("UT(2, dinf_oracle.mat)", data_config()), FormatError);
}

TEST_CASE("cli: ball for Z at n = 10") {
  auto r = cli({"ball", "--group", "Z", "--n", "10"});
  REQUIRE(r.code == kExitOk);
  auto doc = json::parse(r.out);
  CHECK(doc["states"] == 11);
  CHECK(doc["bits"] == 4);
  CHECK(doc["formula_states"] == 11);

  auto v = cli({"ball", "--group", "dihedral_inf", "--n", "7", "--verify"});
  REQUIRE(v.code == kExitOk);
  auto dv = json::parse(v.out);
  CHECK(dv["mismatches"] == 0);
  CHECK(dv["sink"] == true);

  auto csv = cli({"ball", "--group", "Z^2", "--n", "4", "--csv"});
  CHECK(csv.code == kExitOk);
  CHECK(csv.out == "spec,n,states,bits,formula_states\n\"Z^2\",4,13,4,13\n");

  CHECK(cli({"ball", "--group", "free(2)", "--n", "20", "--verify"}).code == kExitResource);
  CHECK(cli({"ball", "--group", "free(3)", "--n", "30", "--cap", "1000"}).code == kExitResource);
}

TEST_CASE("cli: check") {
  const std::string words = testing::data_path("words_z.txt");
  auto r = cli({"check", "--group", "Z", "--n", "8", "--word", words, "--oracle", "--seed", "5"});
  REQUIRE(r.code == kExitOk);
  auto doc = json::parse(r.out);
  REQUIRE(doc["results"].size() == 4);
  CHECK(doc["results"][0]["accept"] == true);
  CHECK(doc["results"][1]["accept"] == false);
  CHECK(doc["results"][2]["accept"] == true);
  CHECK(doc["results"][3]["oracle"] == true);
  CHECK(doc["seed"] == 5);
  CHECK(doc["bits"].get<unsigned>() == space_bits(*build_group("Z").recipe, 8));

  auto s = cli({"check", "--group", "heisenberg", "--n", "64", "--word", "-", "--oracle", "--csv"}, "x y x- y- z-\nx y\n");
  CHECK(s.code == kExitOk);
  CHECK(s.out == "word,accept,oracle,agree\n\"x y x- y- z-\",true,true,true\n\"x y\",false,false,true\n");

  CHECK(cli({"check", "--group", "Z", "--n", "3", "--word", words}).code == kExitFail);
  CHECK(cli({"check", "--group", "Z", "--n", "8", "--word", "-"}, "a b\n").code == kExitUsage);
  CHECK(cli({"check", "--group", "Z", "--n", "8", "--word", testing::data_path("nope.txt")}).code == kExitUsage);
}

TEST_CASE("cli: estimate") {
  auto r = cli({"estimate", "--group", "fp(Z,Z)", "--n", "50", "--kind", "unequal", "--trials", "2000", "--c-inner", "6",
                "--seed", "9"});
  REQUIRE(r.code == kExitOk);
  auto doc = json::parse(r.out);
  CHECK(doc["trials"] == 2000);
  CHECK(doc["kind"] == "unequal");
  CHECK(doc["bound"].get<double>() == doctest::Approx((4.0 * 2500 + 1) / std::pow(50.0, 6)).epsilon(1e-9));
  CHECK(doc["pass"] == true);

  auto bad = cli({"estimate", "--group", "Z", "--n", "16", "--trials", "10"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("100") != std::string::npos);
  CHECK(cli({"estimate", "--group", "Z", "--n", "16", "--kind", "sideways"}).code == kExitUsage);

  auto csv = cli({"estimate", "--group", "Z", "--n", "16", "--trials", "200", "--csv"});
  CHECK(csv.code == kExitOk);
  CHECK(csv.out.rfind(ErrorReport::csv_header() + "\n\"Z\",16,unequal,200,", 0) == 0);
}

TEST_CASE("cli: growth, hard and bench") {
  auto g = cli({"growth", "--group", "free(2)", "--radius", "3", "--csv"});
  CHECK(g.code == kExitOk);
  CHECK(g.out.find("\n3,53,") != std::string::npos);

  auto h = cli({"hard", "--type", "disjointness", "--u", "010", "--v", "011"});
  REQUIRE(h.code == kExitOk);
  auto hd = json::parse(h.out);
  CHECK(hd["identity"] == false);
  CHECK(hd["supports_disjoint"] == false);
  WreathGroup wr(FiniteGroup::symmetric(3), std::make_shared<FreeAbelianGroup>(std::vector<std::string>{"t"}));
  auto [lg, lh] = noncommuting_lamps(wr);
  CHECK(hd["length"] == disjointness_instance(parse_bits("010"), parse_bits("011"), wr, lg, lh).word.size());
  CHECK(json::parse(cli({"hard", "--u", "111", "--v", "111"}).out)["length"] == 28);

  auto gr = cli({"hard", "--type", "grigorchuk", "--u", "10", "--v", "01"});
  REQUIRE(gr.code == kExitOk);
  CHECK(json::parse(gr.out)["identity"] == true);
  CHECK(cli({"hard", "--type", "other", "--u", "1", "--v", "0"}).code == kExitUsage);

  auto b = cli({"bench", "--group", "heisenberg", "--n", "4096", "--letters", "1000"});
  REQUIRE(b.code == kExitOk);
  auto bd = json::parse(b.out);
  CHECK(bd["letters"] == 1000);
  CHECK(bd.contains("letters_per_second"));
  CHECK(bd["bits"].get<unsigned>() == space_bits(*build_group("heisenberg").recipe, 4096));
}

TEST_CASE("cli: usage errors and the seed variable") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"ball", "--n", "4"}).code == kExitUsage);
  auto p = cli({"ball", "--group", "wr(free(2), Z)", "--n", "4"});
  CHECK(p.code == kExitUsage);
  CHECK(p.err.find("1:4") != std::string::npos);
  CHECK(cli({"ball", "--group", "Z", "--n", "0"}).code == kExitUsage);
  CHECK(cli({"ball", "--group", "Z", "--n", "4", "--c", "99"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);

  const std::string words = testing::data_path("words_z.txt");
  ::setenv("WORDSTREAM_SEED", "77", 1);
  auto r = cli({"check", "--group", "Z", "--n", "8", "--word", words});
  CHECK(json::parse(r.out)["seed"] == 77);
  auto o = cli({"check", "--group", "Z", "--n", "8", "--word", words, "--seed", "3"});
  CHECK(json::parse(o.out)["seed"] == 3);
  ::setenv("WORDSTREAM_SEED", "seven", 1);
  CHECK(cli({"check", "--group", "Z", "--n", "8", "--word", words}).code == kExitUsage);
  ::unsetenv("WORDSTREAM_SEED");
  CHECK(json::parse(cli({"check", "--group", "Z", "--n", "8", "--word", words}).out)["seed"] == 1);
}
