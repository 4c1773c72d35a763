#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poset.hpp"

namespace kaninj {

/// Named posets and maps declared in workspace files. Poset and map names
/// share one namespace; collisions are rejected at parse time.
struct Workspace {
    struct MapEntry {
        std::string dom_name;
        std::string cod_name;
        MonotoneMap map;
    };

    std::unordered_map<std::string, PosetPtr> posets;
    std::unordered_map<std::string, MapEntry> maps;
    /// Declaration order, as (kind, name) with kind 'p' or 'm'.
    std::vector<std::pair<char, std::string>> decl_order;

    bool has(const std::string& name) const {
        return posets.count(name) != 0 || maps.count(name) != 0;
    }

    const PosetPtr& poset(const std::string& name) const {
        auto it = posets.find(name);
        if (it == posets.end()) throw ValidationError("unknown poset '" + name + "'");
        return it->second;
    }

    const MonotoneMap& map(const std::string& name) const {
        auto it = maps.find(name);
        if (it == maps.end()) throw ValidationError("unknown map '" + name + "'");
        return it->second.map;
    }
};

namespace detail {

struct Token {
    enum class Kind { ident, lbrace, rbrace, colon, semicolon, lt, arrow, end };
    Kind kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_blank();
        Token t;
        t.line = line_;
        t.column = column_;
        if (pos_ >= src_.size()) {
            t.kind = Token::Kind::end;
            return t;
        }
        char c = src_[pos_];
        if (legal_name_char(c)) {
            t.kind = Token::Kind::ident;
            while (pos_ < src_.size() && legal_name_char(src_[pos_])) {
                t.text.push_back(src_[pos_]);
                advance();
            }
            return t;
        }
        switch (c) {
            case '{': t.kind = Token::Kind::lbrace; break;
            case '}': t.kind = Token::Kind::rbrace; break;
            case ':': t.kind = Token::Kind::colon; break;
            case ';': t.kind = Token::Kind::semicolon; break;
            case '<': t.kind = Token::Kind::lt; break;
            case '-':
                advance();
                if (pos_ >= src_.size() || src_[pos_] != '>')
                    throw ParseError("expected '->'", t.line, t.column);
                t.kind = Token::Kind::arrow;
                break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
        }
        advance();
        return t;
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                return;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class WorkspaceParser {
public:
    WorkspaceParser(std::string_view src, Workspace& ws) : lex_(src), ws_(ws) { shift(); }

    void parse() {
        while (cur_.kind != Token::Kind::end) {
            if (cur_.kind != Token::Kind::ident)
                throw ParseError("expected 'poset' or 'map' declaration", cur_.line, cur_.column);
            if (cur_.text == "poset") {
                parse_poset();
            } else if (cur_.text == "map") {
                parse_map();
            } else {
                throw ParseError("unknown declaration '" + cur_.text + "'", cur_.line,
                                 cur_.column);
            }
        }
    }

private:
    void shift() { cur_ = lex_.next(); }

    Token expect(Token::Kind kind, const char* what) {
        if (cur_.kind != kind) throw ParseError(std::string("expected ") + what, cur_.line,
                                                cur_.column);
        Token t = cur_;
        shift();
        return t;
    }

    Token expect_keyword(const char* word) {
        if (cur_.kind != Token::Kind::ident || cur_.text != word)
            throw ParseError(std::string("expected '") + word + "'", cur_.line, cur_.column);
        Token t = cur_;
        shift();
        return t;
    }

    std::string claim_name(const Token& t) {
        if (ws_.has(t.text))
            throw ParseError("name '" + t.text + "' already declared", t.line, t.column);
        return t.text;
    }

    void parse_poset() {
        Token kw = cur_;
        shift();
        std::string name = claim_name(expect(Token::Kind::ident, "poset name"));
        expect(Token::Kind::lbrace, "'{'");
        expect_keyword("elements");
        expect(Token::Kind::colon, "':'");
        std::vector<std::string> elements;
        while (cur_.kind == Token::Kind::ident) {
            elements.push_back(cur_.text);
            shift();
        }
        std::vector<std::pair<std::string, std::string>> order;
        if (cur_.kind == Token::Kind::semicolon) {
            shift();
            expect_keyword("order");
            expect(Token::Kind::colon, "':'");
            while (cur_.kind == Token::Kind::ident) {
                std::string a = cur_.text;
                shift();
                expect(Token::Kind::lt, "'<'");
                Token b = expect(Token::Kind::ident, "element name");
                order.emplace_back(std::move(a), b.text);
            }
        }
        expect(Token::Kind::rbrace, "'}'");
        try {
            ws_.posets.emplace(name, validate_poset(std::move(elements), order));
        } catch (const Error& e) {
            throw ParseError("poset '" + name + "': " + e.what(), kw.line, kw.column);
        }
        ws_.decl_order.emplace_back('p', std::move(name));
    }

    void parse_map() {
        Token kw = cur_;
        shift();
        std::string name = claim_name(expect(Token::Kind::ident, "map name"));
        expect(Token::Kind::colon, "':'");
        Token domTok = expect(Token::Kind::ident, "poset name");
        expect(Token::Kind::arrow, "'->'");
        Token codTok = expect(Token::Kind::ident, "poset name");
        expect(Token::Kind::lbrace, "'{'");
        std::vector<std::pair<std::string, std::string>> pairs;
        while (cur_.kind == Token::Kind::ident) {
            std::string a = cur_.text;
            shift();
            expect(Token::Kind::arrow, "'->'");
            Token b = expect(Token::Kind::ident, "element name");
            pairs.emplace_back(std::move(a), b.text);
        }
        expect(Token::Kind::rbrace, "'}'");

        auto domIt = ws_.posets.find(domTok.text);
        if (domIt == ws_.posets.end())
            throw ParseError("unknown poset '" + domTok.text + "'", domTok.line, domTok.column);
        auto codIt = ws_.posets.find(codTok.text);
        if (codIt == ws_.posets.end())
            throw ParseError("unknown poset '" + codTok.text + "'", codTok.line, codTok.column);
        const PosetPtr& dom = domIt->second;
        const PosetPtr& cod = codIt->second;

        std::vector<std::size_t> assign(dom->size(), SIZE_MAX);
        for (const auto& [a, b] : pairs) {
            auto ia = dom->index_of(a);
            if (!ia)
                throw ParseError("map '" + name + "': '" + a + "' is not in " + domTok.text,
                                 kw.line, kw.column);
            auto ib = cod->index_of(b);
            if (!ib)
                throw ParseError("map '" + name + "': '" + b + "' is not in " + codTok.text,
                                 kw.line, kw.column);
            if (assign[*ia] != SIZE_MAX)
                throw ParseError("map '" + name + "': '" + a + "' assigned twice", kw.line,
                                 kw.column);
            assign[*ia] = *ib;
        }
        for (std::size_t i = 0; i < assign.size(); ++i)
            if (assign[i] == SIZE_MAX)
                throw ParseError("map '" + name + "': no image for '" + dom->element(i) + "'",
                                 kw.line, kw.column);
        try {
            MonotoneMap f(dom, cod, std::move(assign));
            ws_.maps.emplace(name,
                             Workspace::MapEntry{domTok.text, codTok.text, std::move(f)});
        } catch (const ValidationError& e) {
            // A well-formed declaration with a non-monotone assignment names
            // the offending declaration rather than a source location.
            throw ValidationError("map '" + name + "': " + e.what());
        }
        ws_.decl_order.emplace_back('m', std::move(name));
    }

    Lexer lex_;
    Token cur_;
    Workspace& ws_;
};

}  // namespace detail

inline void parse_workspace_text(std::string_view text, Workspace& ws) {
    detail::WorkspaceParser(text, ws).parse();
}

inline Workspace parse_workspace(const std::vector<std::string>& paths) {
    Workspace ws;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open workspace file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        parse_workspace_text(buf.str(), ws);
    }
    return ws;
}

/// Covering pairs (the transitive reduction), emitted in element order.
inline std::vector<std::pair<std::size_t, std::size_t>> cover_pairs(const FinPoset& p) {
    std::vector<std::pair<std::size_t, std::size_t>> covers;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!p.lt(i, j)) continue;
            bool direct = true;
            for (std::size_t k = 0; k < p.size() && direct; ++k)
                if (p.lt(i, k) && p.lt(k, j)) direct = false;
            if (direct) covers.emplace_back(i, j);
        }
    return covers;
}

inline std::string serialize_poset(const std::string& name, const FinPoset& p) {
    std::string out = "poset " + name + " { elements:";
    for (const auto& e : p.elements()) out += " " + e;
    out += " ; order:";
    for (const auto& [a, b] : cover_pairs(p)) out += " " + p.element(a) + "<" + p.element(b);
    out += " }";
    return out;
}

inline std::string serialize_map(const std::string& name, const Workspace::MapEntry& entry) {
    std::string out = "map " + name + " : " + entry.dom_name + " -> " + entry.cod_name + " {";
    const auto& dom = *entry.map.dom();
    const auto& cod = *entry.map.cod();
    for (std::size_t i = 0; i < dom.size(); ++i)
        out += " " + dom.element(i) + "->" + cod.element(entry.map.apply(i));
    out += " }";
    return out;
}

inline std::string serialize_workspace(const Workspace& ws) {
    std::string out;
    for (const auto& [kind, name] : ws.decl_order) {
        if (kind == 'p')
            out += serialize_poset(name, *ws.posets.at(name));
        else
            out += serialize_map(name, ws.maps.at(name));
        out += "\n";
    }
    return out;
}

}  // namespace kaninj
