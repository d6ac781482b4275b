#include "wordstream/builder.hpp"

#include <filesystem>

#include "wordstream/combinators.hpp"
#include "wordstream/errors.hpp"
#include "wordstream/fingerprint.hpp"
#include "wordstream/formats.hpp"
#include "wordstream/grigorchuk.hpp"
#include "wordstream/matrix_group.hpp"
#include "wordstream/primes.hpp"

namespace wordstream {

namespace {

using K = GroupSpec::Kind;

std::string resolve(const BuildConfig& cfg, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_absolute() || cfg.base_dir.empty()) return file;
  return (std::filesystem::path(cfg.base_dir) / p).string();
}

std::string where(const GroupSpec& g) { return std::to_string(g.line) + ":" + std::to_string(g.column) + ": "; }

RecipePtr linear(MatrixGenerators gens, unsigned c) { return std::make_shared<LinearFingerprintRecipe>(std::move(gens), c); }

std::vector<IntMatrix> integer_unitriangular(const MatrixGenerators& gens, const GroupSpec& g) {
  if (gens.vars != 0 || !(gens.denominator == Poly(1)) || gens.characteristic)
    throw FormatError(where(g) + "UT file must hold integer matrices (vars 0, denom 1, char 0)");
  std::vector<IntMatrix> out;
  for (const auto& m : gens.forward) {
    IntMatrix im(gens.dim, gens.dim);
    for (unsigned r = 0; r < gens.dim; ++r)
      for (unsigned c = 0; c < gens.dim; ++c) {
        const Poly& e = m(r, c);
        if (!e.is_constant() || !e.has_integer_coefficients()) throw FormatError(where(g) + "UT entries must be integers");
        Rational v = e.constant_value();
        im(r, c) = boost::multiprecision::numerator(v);
        if ((r > c && im(r, c) != 0) || (r == c && im(r, c) != 1))
          throw FormatError(where(g) + "UT generators must be upper unitriangular");
      }
    out.push_back(std::move(im));
  }
  return out;
}

struct Lamp {
  GroupPtr oracle;
  RecipePtr recipe;  // used with a finite top group
  std::vector<LampFactor> factors;
};

void prime_power(std::uint64_t m, std::uint64_t& p, unsigned& k) {
  for (p = 2; p * p <= m; ++p)
    if (m % p == 0) break;
  if (p * p > m) p = m;
  k = 0;
  while (m % p == 0) {
    m /= p;
    ++k;
  }
}

class Builder {
 public:
  explicit Builder(const BuildConfig& cfg) : cfg_(cfg) {}

  BuiltGroup build(const GroupSpec& g, unsigned c) {
    switch (g.kind) {
      case K::Z:
        return {linear(abelian_diagonal(1), c), std::make_shared<FreeAbelianGroup>(1)};
      case K::Zpow: {
        auto m = static_cast<unsigned>(g.ints.at(0));
        return {linear(abelian_diagonal(m), c), std::make_shared<FreeAbelianGroup>(m)};
      }
      case K::Zmod: {
        auto grp = std::make_shared<CyclicGroup>(g.ints.at(0));
        return {std::make_shared<ExactBallRecipe>(grp, cfg_.ball_cap), grp};
      }
      case K::free: {
        auto r = static_cast<unsigned>(g.ints.at(0));
        return {linear(sanov_free(r), c), std::make_shared<FreeGroup>(r)};
      }
      case K::matrix: {
        auto gens = parse_matrix_file(read_text_file(resolve(cfg_, g.file)));
        GroupPtr oracle = gens.characteristic ? nullptr : std::make_shared<MatrixGroup>(gens);
        return {linear(gens, g.c.value_or(c)), oracle};
      }
      case K::UT: {
        auto gens = parse_matrix_file(read_text_file(resolve(cfg_, g.file)));
        if (gens.dim != g.ints.at(0))
          throw FormatError(where(g) + "UT(" + std::to_string(g.ints[0]) + ", ...) file has dim " + std::to_string(gens.dim));
        auto mats = integer_unitriangular(gens, g);
        auto oracle = std::make_shared<UnitriangularGroup>(gens.alphabet->names(), mats);
        return {std::make_shared<NilpotentFingerprintRecipe>(gens.alphabet, mats, g.c.value_or(c)), oracle};
      }
      case K::heisenberg: {
        auto h = UnitriangularGroup::heisenberg();
        return {std::make_shared<NilpotentFingerprintRecipe>(h->alphabet_ptr(), h->matrices(), c), h};
      }
      case K::grigorchuk: {
        auto grp = std::make_shared<GrigorchukGroup>();
        return {std::make_shared<ExactBallRecipe>(grp, cfg_.ball_cap), grp};
      }
      case K::finite: {
        auto grp = parse_finite_table(read_text_file(resolve(cfg_, g.file)));
        return {std::make_shared<ExactBallRecipe>(grp, cfg_.ball_cap), grp};
      }
      case K::dihedral_inf:
        return {linear(dihedral_matrices(), c), std::make_shared<MatrixGroup>(dihedral_matrices())};
      case K::dp: {
        auto a = build(g.children.at(0), c);
        auto b = build(g.children.at(1), c);
        GroupPtr o = a.oracle && b.oracle ? std::make_shared<DirectProductGroup>(a.oracle, b.oracle) : nullptr;
        return {direct_product(a.recipe, b.recipe), o};
      }
      case K::fp: {
        auto a = build(g.children.at(0), cfg_.c_inner);
        auto b = build(g.children.at(1), cfg_.c_inner);
        GroupPtr o = a.oracle && b.oracle ? std::make_shared<FreeProductGroup>(a.oracle, b.oracle) : nullptr;
        return {free_product(a.recipe, b.recipe, cfg_.c_f2), o};
      }
      case K::wr:
        return wreath(g);
      case K::ext:
        return extension(g, c);
      case K::regen: {
        auto base = build(g.children.at(0), c);
        auto map = parse_generator_map(read_text_file(resolve(cfg_, g.file)), *base.recipe->alphabet());
        GroupPtr o = base.oracle ? std::make_shared<RegenGroup>(base.oracle, map.alphabet, map.images) : nullptr;
        return {change_generators(base.recipe, map.alphabet, map.images), o};
      }
    }
    throw Error("unknown group kind");
  }

 private:
  Lamp lamp_group(const GroupSpec& g) {
    std::vector<Lamp> parts;
    for (const auto& l : g.lamps) {
      Lamp part;
      if (l.kind == K::Z || l.kind == K::Zpow) {
        auto m = l.kind == K::Z ? 1u : static_cast<unsigned>(l.ints.at(0));
        part.oracle = std::make_shared<FreeAbelianGroup>(m);
        part.recipe = linear(abelian_diagonal(m), cfg_.c_inner);
        for (unsigned i = 0; i < m; ++i) part.factors.push_back(LampFactor::integer());
      } else if (l.kind == K::Zmod) {
        std::uint64_t p;
        unsigned k;
        prime_power(l.ints.at(0), p, k);
        auto grp = std::make_shared<CyclicGroup>(l.ints[0]);
        part.oracle = grp;
        part.recipe = std::make_shared<ExactBallRecipe>(grp, cfg_.ball_cap);
        part.factors.push_back(LampFactor::cyclic(p, k));
      } else {
        throw ConstructionError(where(l) + "non-abelian lamp group");
      }
      parts.push_back(std::move(part));
    }
    Lamp out = parts.at(0);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      out.oracle = std::make_shared<DirectProductGroup>(out.oracle, parts[i].oracle);
      out.recipe = direct_product(out.recipe, parts[i].recipe);
      out.factors.insert(out.factors.end(), parts[i].factors.begin(), parts[i].factors.end());
    }
    const auto& names = out.oracle->alphabet().names();
    for (std::size_t i = 0; i < out.factors.size(); ++i) out.factors[i].name = names.at(i);
    return out;
  }

  BuiltGroup wreath(const GroupSpec& g) {
    Lamp lamp = lamp_group(g);
    const GroupSpec& top_spec = g.children.at(0);
    if (top_spec.kind == K::Zmod || top_spec.kind == K::finite) {
      std::shared_ptr<const FiniteGroup> top;
      if (top_spec.kind == K::finite) {
        top = parse_finite_table(read_text_file(resolve(cfg_, top_spec.file)));
      } else {
        auto m = static_cast<std::uint32_t>(top_spec.ints.at(0));
        if (m > 4096) throw ConstructionError(where(top_spec) + "finite top group Zmod(m) needs m <= 4096");
        top = cyclic_table(m);
      }
      return {wreath_finite(lamp.recipe, top), std::make_shared<WreathGroup>(lamp.oracle, top)};
    }
    auto inner = build(top_spec, cfg_.c_inner);
    if (cfg_.exact_top && inner.oracle) inner.recipe = std::make_shared<ExactBallRecipe>(inner.oracle, cfg_.ball_cap);
    WreathOptions o;
    o.d = cfg_.d;
    o.eps_prime = cfg_.eps_prime;
    GroupPtr oracle = inner.oracle ? std::make_shared<WreathGroup>(lamp.oracle, inner.oracle) : nullptr;
    return {wreath_abelian(inner.recipe, lamp.factors, o), oracle};
  }

  static std::shared_ptr<FiniteGroup> cyclic_table(std::uint32_t m) {
    std::vector<std::string> names;
    std::vector<std::vector<std::uint32_t>> table(m, std::vector<std::uint32_t>(m));
    for (std::uint32_t i = 0; i < m; ++i) {
      names.push_back(i == 0 ? "e" : i == 1 ? "a" : "a" + std::to_string(i));
      for (std::uint32_t j = 0; j < m; ++j) table[i][j] = (i + j) % m;
    }
    return std::make_shared<FiniteGroup>(names, table, std::vector<std::uint32_t>{m > 1 ? 1u : 0u});
  }

  BuiltGroup extension(const GroupSpec& g, unsigned c) {
    auto base = build(g.children.at(0), c);
    const std::string path = resolve(cfg_, g.file);
    auto file = parse_extension_file(read_text_file(path), base.recipe->alphabet());
    GroupPtr oracle;
    if (file.oracle_matrix_file) {
      auto dir = std::filesystem::path(path).parent_path().string();
      BuildConfig sub = cfg_;
      sub.base_dir = dir;
      auto gens = parse_matrix_file(read_text_file(resolve(sub, *file.oracle_matrix_file)));
      if (gens.characteristic) throw FormatError(where(g) + "extension oracle must be a characteristic-zero matrix group");
      auto big = std::make_shared<MatrixGroup>(gens);
      file.data.verify(*big);
      oracle = big;
    } else if (base.oracle) {
      auto eg = std::make_shared<ExtensionGroup>(base.oracle, file.data);
      eg->check_consistency();
      oracle = eg;
    }
    return {finite_extension(base.recipe, std::move(file.data)), oracle};
  }

  const BuildConfig& cfg_;
};

}  // namespace

BuiltGroup build_group(const GroupSpec& spec, const BuildConfig& config) {
  BuiltGroup b = Builder(config).build(spec, config.c);
  if (b.oracle && !(b.oracle->alphabet() == *b.recipe->alphabet()))
    throw Error("internal: oracle and recipe alphabets differ for " + print_group_spec(spec));
  return b;
}

BuiltGroup build_group(const std::string& text, const BuildConfig& config) {
  return build_group(parse_group_spec(text), config);
}

}  // namespace wordstream
