#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgs/errors.hpp"

namespace sgs {

// Grammar symbol: a terminal word or a nonterminal name.
struct Symbol {
    std::string text;
    bool is_nonterminal = false;

    static Symbol term(std::string w) { return Symbol{std::move(w), false}; }
    static Symbol nonterm(std::string n) { return Symbol{std::move(n), true}; }

    bool operator==(const Symbol&) const = default;
};

using Alternative = std::vector<Symbol>;

struct Rule {
    std::string lhs;
    std::vector<Alternative> alternatives;
};

// Start symbol plus ordered production alternatives. Alternative order is
// significant: the i-th alternative of a 2^m-way rule carries the bit
// pattern of i.
class Grammar {
public:
    // Appends alternatives; a repeated lhs extends the existing rule.
    void add_rule(std::string lhs, std::vector<Alternative> alternatives) {
        auto it = index_.find(lhs);
        if (it == index_.end()) {
            index_.emplace(lhs, rules_.size());
            rules_.push_back(Rule{std::move(lhs), std::move(alternatives)});
        } else {
            auto& alts = rules_[it->second].alternatives;
            alts.insert(alts.end(), std::make_move_iterator(alternatives.begin()),
                        std::make_move_iterator(alternatives.end()));
        }
    }

    const Rule* find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        return it == index_.end() ? nullptr : &rules_[it->second];
    }

    const std::string& start() const {
        if (rules_.empty()) throw InvalidGrammar("grammar has no rules");
        return rules_.front().lhs;
    }

    const std::vector<Rule>& rules() const { return rules_; }
    bool empty() const { return rules_.empty(); }

private:
    std::vector<Rule> rules_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline bool is_nonterminal_token(std::string_view tok) {
    if (tok.empty() || tok[0] < 'A' || tok[0] > 'Z') return false;
    for (char c : tok.substr(1)) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                  (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

// Text format: one rule per line, `Name -> alt | alt | ...`, symbols
// whitespace-separated, `#` comments a whole line. Tokens matching
// [A-Z][A-Za-z0-9_]* are nonterminal references; anything else is a
// terminal word. The first rule's left side is the start symbol.
inline Grammar parse_grammar(std::string_view text) {
    Grammar g;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::vector<std::string> toks;
        {
            std::istringstream in{std::string(line)};
            std::string t;
            while (in >> t) toks.push_back(t);
        }
        if (toks.empty() || toks[0][0] == '#') continue;

        if (toks.size() < 2 || toks[1] != "->")
            throw InvalidGrammar("line " + std::to_string(line_no) +
                                 ": expected `Name -> ...`");
        if (!is_nonterminal_token(toks[0]))
            throw InvalidGrammar("line " + std::to_string(line_no) +
                                 ": rule name `" + toks[0] +
                                 "` is not a valid nonterminal");

        std::vector<Alternative> alts;
        Alternative cur;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            if (toks[i] == "|") {
                alts.push_back(std::move(cur));
                cur.clear();
            } else if (is_nonterminal_token(toks[i])) {
                cur.push_back(Symbol::nonterm(toks[i]));
            } else {
                cur.push_back(Symbol::term(toks[i]));
            }
        }
        alts.push_back(std::move(cur));
        g.add_rule(toks[0], std::move(alts));
    }
    if (g.empty()) throw InvalidGrammar("grammar file contains no rules");
    return g;
}

struct Violation {
    std::string nonterminal;
    std::string message;
};

namespace detail {

// First terminal words reachable from a symbol by leftmost expansion.
// Cycles terminate the walk; they are reported as left recursion.
inline void first_terminals(const Grammar& g, const Symbol& sym,
                            std::set<std::string>& out,
                            std::set<std::string>& visiting) {
    if (!sym.is_nonterminal) {
        out.insert(sym.text);
        return;
    }
    if (visiting.count(sym.text)) return;
    const Rule* rule = g.find(sym.text);
    if (!rule) return;
    visiting.insert(sym.text);
    for (const Alternative& alt : rule->alternatives) {
        if (!alt.empty()) first_terminals(g, alt.front(), out, visiting);
    }
    visiting.erase(sym.text);
}

inline bool left_recurses(const Grammar& g, const std::string& start_nt,
                          const std::string& nt, std::set<std::string>& visited) {
    const Rule* rule = g.find(nt);
    if (!rule) return false;
    for (const Alternative& alt : rule->alternatives) {
        if (alt.empty() || !alt.front().is_nonterminal) continue;
        const std::string& next = alt.front().text;
        if (next == start_nt) return true;
        if (visited.insert(next).second &&
            left_recurses(g, start_nt, next, visited))
            return true;
    }
    return false;
}

}  // namespace detail

// Reports every invariant violation; an empty report means embed and
// extract accept the grammar.
inline std::vector<Violation> validate_grammar(const Grammar& g) {
    std::vector<Violation> out;
    if (g.empty()) {
        out.push_back({"", "grammar has no rules"});
        return out;
    }

    for (const Rule& rule : g.rules()) {
        std::size_t n = rule.alternatives.size();
        if (n == 0 || (n & (n - 1)) != 0)
            out.push_back({rule.lhs, "alternative count " + std::to_string(n) +
                                         " is not a power of two"});

        for (std::size_t a = 0; a < n; ++a) {
            if (rule.alternatives[a].empty())
                out.push_back({rule.lhs, "alternative " + std::to_string(a) +
                                             " is empty"});
            for (const Symbol& s : rule.alternatives[a]) {
                if (s.is_nonterminal && g.find(s.text) == nullptr)
                    out.push_back({rule.lhs, "references undefined nonterminal `" +
                                                 s.text + "`"});
            }
        }

        // pairwise-disjoint first terminal sets make extraction LL(1)
        std::set<std::string> seen;
        for (std::size_t a = 0; a < n; ++a) {
            if (rule.alternatives[a].empty()) continue;
            std::set<std::string> firsts, visiting;
            detail::first_terminals(g, rule.alternatives[a].front(), firsts, visiting);
            for (const std::string& w : firsts) {
                if (!seen.insert(w).second)
                    out.push_back({rule.lhs, "alternatives share first terminal `" +
                                                 w + "`"});
            }
        }

        std::set<std::string> visited;
        if (detail::left_recurses(g, rule.lhs, rule.lhs, visited))
            out.push_back({rule.lhs, "left recursion produces no terminal"});
    }
    return out;
}

// Loads and validates, throwing on either failure; for call sites that
// have no use for violations-as-data.
inline Grammar load_grammar(std::string_view text) {
    Grammar g = parse_grammar(text);
    std::vector<Violation> v = validate_grammar(g);
    if (!v.empty())
        throw InvalidGrammar(v.front().nonterminal + ": " + v.front().message +
                             (v.size() > 1 ? " (+" + std::to_string(v.size() - 1) +
                                                 " more violations)"
                                           : ""));
    return g;
}

}  // namespace sgs
