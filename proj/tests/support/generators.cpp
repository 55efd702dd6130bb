#include "generators.hpp"

#include <cctype>
#include <functional>
#include <stdexcept>

#include "perfix/abstraction.hpp"
#include "perfix/errors.hpp"
#include "perfix/lexer.hpp"

namespace perfix::testing {
namespace {

const std::vector<std::string> kMethodCandidates = {
    "Where", "Select", "FirstOrDefault", "Any", "Count", "ToList", "ToArray", "Contains",
    "ContainsKey", "Add", "Remove", "OrderBy", "Sum", "Max", "Min", "Append", "ToString",
    "Split", "Trim", "StartsWith", "Equals", "Concat", "Skip", "Take", "Distinct", "First",
    "GetValueOrDefault", "TryGetValue", "IndexOf", "Replace", "ToLower", "Clear"};

const std::vector<std::string> kTypeCandidates = {
    "List", "Dictionary", "HashSet", "StringBuilder", "Math", "Enumerable", "String",
    "Task", "Path", "Console", "Queue", "Stack"};

const std::vector<std::string> kSyllables = {"zo", "ka", "ri", "mu", "te", "vex", "qu", "ni",
                                             "bo", "la", "fy", "dra", "po", "sen", "gh"};

}  // namespace

std::string render(const CodeTemplate& t, const Naming& naming) {
  std::string out;
  out.reserve(t.text.size() + 64);
  for (std::size_t i = 0; i < t.text.size(); ++i) {
    const char c = t.text[i];
    if (c == '$' && i + 1 < t.text.size() &&
        (t.text[i + 1] == 'V' || t.text[i + 1] == 'P' || t.text[i + 1] == 'L')) {
      std::size_t j = i + 2;
      while (j < t.text.size() && std::isdigit(static_cast<unsigned char>(t.text[j]))) ++j;
      if (j > i + 2) {
        const auto idx = static_cast<std::size_t>(std::stoi(t.text.substr(i + 2, j - i - 2)));
        const auto& pool = t.text[i + 1] == 'V'   ? naming.variables
                           : t.text[i + 1] == 'P' ? naming.projects
                                                  : naming.literals;
        out += pool.at(idx);
        i = j - 1;
        continue;
      }
    }
    out += c;
  }
  return out;
}

CodeGenerator::CodeGenerator(std::uint64_t seed, const CommonVocabulary& vocab)
    : rng_(seed), vocab_(vocab) {
  for (const auto& m : kMethodCandidates)
    if (vocab.has_identifier(m)) methods_.push_back(m);
  for (const auto& t : kTypeCandidates)
    if (vocab.has_identifier(t)) types_.push_back(t);
  if (methods_.size() < 5 || types_.size() < 3)
    throw std::runtime_error("vocabulary lacks the common APIs the generator relies on");
}

int CodeGenerator::pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

std::string CodeGenerator::var_ref(CodeTemplate& t, std::vector<int>& scope) {
  if (scope.empty()) return new_var(t, scope);
  return "$V" + std::to_string(choose(scope));
}

std::string CodeGenerator::new_var(CodeTemplate& t, std::vector<int>& scope) {
  const int id = t.variables++;
  scope.push_back(id);
  return "$V" + std::to_string(id);
}

std::string CodeGenerator::project(CodeTemplate& t) {
  if (t.projects > 0 && pick(2) == 0) return "$P" + std::to_string(pick(t.projects));
  return "$P" + std::to_string(t.projects++);
}

std::string CodeGenerator::literal(CodeTemplate& t) {
  const int id = t.literals++;
  literal_numeric_[id] = pick(2) == 0;
  return "$L" + std::to_string(id);
}

std::string CodeGenerator::expr(CodeTemplate& t, int depth, std::vector<int>& scope) {
  if (depth <= 0 || pick(4) == 0) {
    switch (pick(5)) {
      case 0:
        return project(t);
      case 1:
        return literal(t);
      case 2:
        return choose(std::vector<std::string>{"0", "1", "null", "true", "\"\""});
      default:
        return var_ref(t, scope);
    }
  }
  auto args = [&]() {
    std::string a;
    const int n = pick(3);
    for (int i = 0; i < n; ++i) {
      if (i) a += ", ";
      if (pick(3) == 0) {
        auto inner = scope;
        const auto param = new_var(t, inner);
        a += param + " => " + expr(t, depth - 1, inner);
      } else {
        a += expr(t, depth - 1, scope);
      }
    }
    return a;
  };
  switch (pick(7)) {
    case 0:
    case 1:
      return receiver(t, depth - 1, scope) + "." + choose(methods_) + "(" + args() + ")";
    case 2:
      return receiver(t, depth - 1, scope) + "." + project(t);
    case 3:
      return choose(types_) + "." + choose(methods_) + "(" + args() + ")";
    case 4:
      return "new " + choose(types_) + "(" + args() + ")";
    case 5:
      return "(" + expr(t, depth - 1, scope) + " " +
             choose(std::vector<std::string>{"==", ">", "<", "+", "&&", "!="}) + " " +
             expr(t, depth - 1, scope) + ")";
    default:
      return project(t) + "(" + args() + ")";
  }
}

std::string CodeGenerator::receiver(CodeTemplate& t, int depth, std::vector<int>& scope) {
  if (depth > 0 && pick(2) == 0) {
    auto r = expr(t, depth, scope);
    // Literal receivers such as `5.Where` do not lex as member access.
    const bool literal_like = r.starts_with("$L") || r.starts_with("\"") || r == "0" ||
                              r == "1" || r == "null" || r == "true";
    if (!literal_like) return r;
  }
  return pick(3) == 0 ? project(t) : var_ref(t, scope);
}

std::string CodeGenerator::stmt(CodeTemplate& t, std::vector<int>& scope, int depth) {
  const int kinds = depth > 0 ? 8 : 6;
  switch (pick(kinds)) {
    case 0:
    case 1: {
      const auto value = expr(t, 3, scope);
      return "var " + new_var(t, scope) + " = " + value + ";";
    }
    case 2:
      return var_ref(t, scope) + " = " + expr(t, 3, scope) + ";";
    case 3:
      return receiver(t, 2, scope) + "." + choose(methods_) + "(" + expr(t, 1, scope) + ");";
    case 4:
      return "if (" + expr(t, 2, scope) + ") return " + expr(t, 1, scope) + ";";
    case 5:
      return var_ref(t, scope) + " += " + expr(t, 2, scope) + ";";
    case 6: {
      const auto source = expr(t, 2, scope);
      auto inner = scope;
      const auto item = new_var(t, inner);
      return "foreach (var " + item + " in " + source + ") { " + stmt(t, inner, depth - 1) + " }";
    }
    default: {
      const auto cond = expr(t, 2, scope);
      auto inner = scope;
      return "while (" + cond + ") { " + stmt(t, inner, depth - 1) + " }";
    }
  }
}

CodeTemplate CodeGenerator::statement() {
  CodeTemplate t;
  std::vector<int> scope;
  const int n = 1 + pick(2);
  for (int i = 0; i < n; ++i) scope.push_back(t.variables++);
  t.text = stmt(t, scope, 1);
  return t;
}

CodeTemplate CodeGenerator::method() {
  CodeTemplate t;
  std::vector<int> scope;
  const auto name = project(t);
  std::string params;
  const int np = 1 + pick(2);
  for (int i = 0; i < np; ++i) {
    if (i) params += ", ";
    const auto type = pick(2) == 0 ? project(t) : choose(std::vector<std::string>{"int", "string", "object"});
    params += type + " " + new_var(t, scope);
  }
  std::string body;
  const int ns = 2 + pick(5);
  for (int i = 0; i < ns; ++i) body += "    " + stmt(t, scope, 1) + "\n";
  body += "    return " + expr(t, 2, scope) + ";\n";
  t.text = "public object " + name + "(" + params + ")\n{\n" + body + "}";
  return t;
}

std::string CodeGenerator::fresh_identifier() {
  for (;;) {
    std::string name;
    const int parts = 2 + pick(2);
    for (int i = 0; i < parts; ++i) name += choose(kSyllables);
    if (pick(3) == 0) name += std::to_string(pick(100));
    if (is_csharp_keyword(name) || vocab_.has_identifier(name)) continue;
    if (used_names_.emplace(name, true).second) return name;
  }
}

std::string CodeGenerator::fresh_literal(bool numeric) {
  for (;;) {
    std::string lit = numeric ? std::to_string(2 + pick(100000))
                              : "\"" + fresh_identifier() + "\"";
    if (vocab_.has_literal(lit)) continue;
    if (used_names_.emplace(lit, true).second) return lit;
  }
}

Naming CodeGenerator::naming(const CodeTemplate& t) {
  Naming n;
  for (int i = 0; i < t.variables; ++i) n.variables.push_back(fresh_identifier());
  for (int i = 0; i < t.projects; ++i) n.projects.push_back(fresh_identifier());
  for (int i = 0; i < t.literals; ++i) {
    const auto it = literal_numeric_.find(i);
    n.literals.push_back(fresh_literal(it == literal_numeric_.end() || it->second));
  }
  return n;
}

Naming CodeGenerator::rename_variables(const Naming& base) {
  Naming n = base;
  for (auto& v : n.variables) v = fresh_identifier();
  return n;
}

Naming CodeGenerator::rename_all(const Naming& base) {
  Naming n = base;
  for (auto& v : n.variables) v = fresh_identifier();
  for (auto& p : n.projects) p = fresh_identifier();
  for (auto& l : n.literals) l = fresh_literal(l.front() != '"');
  return n;
}

std::string CodeGenerator::reformat(const std::string& code) {
  std::string out;
  for (const auto& tok : lex_csharp(code).tokens) {
    if (!out.empty()) out += pick(4) == 0 ? "\n  " : " ";
    out += tok.text;
    if (tok.kind == LexKind::kComment && tok.text.starts_with("//")) out += '\n';
    if (tok.text == ";" && pick(5) == 0) out += " // note\n";
    if (tok.text == "{" && pick(3) == 0) out += "\n/* reformatted */";
  }
  return out;
}

GeneratedCompletion generate_completion(std::mt19937_64& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int counter = 0;
  auto name = [&](const char* prefix) { return std::string(prefix) + std::to_string(counter++); };

  std::function<std::string(int, const std::string&)> statement =
      [&](int depth, const std::string& indent) -> std::string {
    const int kinds = depth > 0 ? 16 : 13;
    switch (pick(kinds)) {
      case 0:
        return indent + "var " + name("s") + " = \"text { with } braces\";\n";
      case 1:
        return indent + "var " + name("s") + " = \"escaped \\\" } quote {\";\n";
      case 2:
        return indent + "var " + name("v") + " = @\"verbatim \"\" { \"\" path\\\";\n";
      case 3:
        return indent + "var " + name("i") + " = $\"value {count} and {{literal}} }}\";\n";
      case 4:
        return indent + "var " + name("i") +
               " = $\"nested {(count > 0 ? \"}\" : \"{\")} end\";\n";
      case 5:
        return indent + "char " + name("c") + " = '{';\n";
      case 6:
        return indent + "char " + name("c") + " = '}';\n";
      case 7:
        return indent + "// line comment with a stray } brace\n";
      case 8:
        return indent + "/* block comment { with } braces { */\n";
      case 9:
        return indent + "var " + name("a") + " = new[] { 1, 2, 3 };\n";
      case 10:
        return indent + "Action " + name("f") + " = () => { };\n";
      case 11:
        return indent + "var " + name("x") + " = $@\"mixed {count} {{ \"\" }}\";\n";
      case 12:
        return indent + "count += items.Count(x => x.Name == \"}\");\n";
      case 13: {
        std::string s = indent + "if (count > 0)\n" + indent + "{\n";
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) s += statement(depth - 1, indent + "    ");
        return s + indent + "}\n";
      }
      case 14: {
        std::string s = indent + "foreach (var item in items)\n" + indent + "{\n";
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) s += statement(depth - 1, indent + "    ");
        return s + indent + "}\n";
      }
      default: {
        std::string s = indent + "Func<int, int> " + name("g") + " = x =>\n" + indent + "{\n";
        s += statement(depth - 1, indent + "    ");
        return s + indent + "    return x;\n" + indent + "};\n";
      }
    }
  };

  GeneratedCompletion g;
  g.signature = "public int Work" + std::to_string(pick(1000)) + "(List<Item> items)";
  std::string body = "    var count = 0;\n";
  const int n = 1 + pick(6);
  for (int i = 0; i < n; ++i) body += statement(2, "    ");
  body += "    return count;\n}";
  static const std::vector<std::string> trailers = {
      "\n",
      "\n\n// } trailing comment\n",
      "\n\npublic void Next()\n{\n    Use(\"}\");\n}\n",
      "\n/* PERF: more { */\npublic int Other() { return 1; }\n",
      "\n\nprivate static readonly string Marker = \"{\";\n",
  };
  g.completion = body + trailers[static_cast<std::size_t>(pick(static_cast<int>(trailers.size())))];
  g.expected_method = g.signature + " {\n" + body;
  return g;
}

KbFixture kb_fixture(std::uint64_t seed, std::size_t patterns, const std::vector<std::string>& repos,
                     const CommonVocabulary& vocab, const std::set<std::string>& exclude) {
  CodeGenerator gen(seed, vocab);
  KbFixture out;
  std::set<std::string> used(exclude.begin(), exclude.end());
  while (out.patterns.size() < patterns) {
    const auto t = gen.statement();
    if (t.text.find('{') != std::string::npos) continue;
    const auto naming = gen.naming(t);
    BugPattern pattern;
    try {
      pattern = abstract_statement_text(render(t, naming), vocab);
    } catch (const ParseError&) {
      continue;
    }
    if (pattern.is_bare() || used.contains(pattern.raw)) continue;

    std::vector<MethodPair> made;
    for (const auto& repo : repos) {
      const auto mt = gen.method();
      const auto after = render(mt, gen.naming(mt));
      auto before = after;
      before.insert(before.find("{\n") + 2, "    " + render(t, gen.rename_all(naming)) + "\n");
      try {
        MethodPair pair{parse_method_text(before), parse_method_text(after), repo,
                        "c" + std::to_string(out.patterns.size()),
                        "Gen" + std::to_string(out.patterns.size()) + ".cs"};
        if (diff_removed_statements(pair).size() != 1) break;
        made.push_back(std::move(pair));
      } catch (const ParseError&) {
        break;
      }
    }
    if (made.size() != repos.size()) continue;
    used.insert(pattern.raw);
    out.patterns.push_back(pattern.raw);
    for (auto& p : made) out.pairs.push_back(std::move(p));
  }
  return out;
}

}  // namespace perfix::testing
