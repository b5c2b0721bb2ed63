#include "adaptkit/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "adaptkit/text.hpp"

namespace adaptkit {

namespace {

constexpr int kMaxDiagnostics = 50;
constexpr int kMaxNestingDepth = 64;
constexpr int kMaxExprDepth = 256;

enum class TokenKind {
    Ident,
    Number,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Dot,
    Arrow,        // ->
    FatArrow,     // =>
    DashBracket,  // -[
    BracketArrow, // ]->
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    double number = 0.0;
    SourceSpan span;
};

const char* token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Number: return "number";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Colon: return "':'";
        case TokenKind::Semi: return "';'";
        case TokenKind::Dot: return "'.'";
        case TokenKind::Arrow: return "'->'";
        case TokenKind::FatArrow: return "'=>'";
        case TokenKind::DashBracket: return "'-['";
        case TokenKind::BracketArrow: return "']->'";
        case TokenKind::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

    std::pair<std::vector<Token>, std::vector<Diagnostic>> run() {
        while (pos_ < text_.size()) {
            if (diagnostics_.size() >= kMaxDiagnostics) break;
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
                continue;
            }
            if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                lex_ident();
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                lex_number();
                continue;
            }
            lex_punct();
        }
        Token end;
        end.kind = TokenKind::End;
        end.span = span_here(0);
        tokens_.push_back(end);
        return {std::move(tokens_), std::move(diagnostics_)};
    }

private:
    SourceSpan span_here(int length) const {
        return SourceSpan{file_, line_, column_, length};
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void push(TokenKind kind, std::size_t start, SourceSpan span) {
        Token t;
        t.kind = kind;
        t.text = std::string(text_.substr(start, pos_ - start));
        t.span = span;
        t.span.length = static_cast<int>(pos_ - start);
        tokens_.push_back(std::move(t));
    }

    void lex_ident() {
        std::size_t start = pos_;
        SourceSpan span = span_here(0);
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                advance();
            else
                break;
        }
        push(TokenKind::Ident, start, span);
    }

    void lex_number() {
        std::size_t start = pos_;
        SourceSpan span = span_here(0);
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            advance();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                diagnostics_.push_back(make_error("lexical error: malformed real literal", span));
                return;
            }
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                diagnostics_.push_back(make_error("lexical error: malformed real literal", span));
                return;
            }
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance();
        }
        std::string raw(text_.substr(start, pos_ - start));
        Token t;
        t.kind = TokenKind::Number;
        t.text = raw;
        t.span = span;
        t.span.length = static_cast<int>(pos_ - start);
        auto result = std::from_chars(raw.data(), raw.data() + raw.size(), t.number);
        if (result.ec != std::errc{}) {
            diagnostics_.push_back(make_error("lexical error: malformed real literal", span));
            return;
        }
        tokens_.push_back(std::move(t));
    }

    void lex_punct() {
        SourceSpan span = span_here(1);
        char c = text_[pos_];
        char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
        auto two = [&](TokenKind kind) {
            std::size_t start = pos_;
            advance();
            advance();
            push(kind, start, span);
        };
        auto one = [&](TokenKind kind) {
            std::size_t start = pos_;
            advance();
            push(kind, start, span);
        };
        switch (c) {
            case '{': one(TokenKind::LBrace); return;
            case '}': one(TokenKind::RBrace); return;
            case '(': one(TokenKind::LParen); return;
            case ')': one(TokenKind::RParen); return;
            case '[': one(TokenKind::LBracket); return;
            case ']':
                if (next == '-' && pos_ + 2 < text_.size() && text_[pos_ + 2] == '>') {
                    std::size_t start = pos_;
                    advance();
                    advance();
                    advance();
                    push(TokenKind::BracketArrow, start, span);
                    return;
                }
                one(TokenKind::RBracket);
                return;
            case ':': one(TokenKind::Colon); return;
            case ';': one(TokenKind::Semi); return;
            case '.': one(TokenKind::Dot); return;
            case '-':
                if (next == '>') {
                    two(TokenKind::Arrow);
                    return;
                }
                if (next == '[') {
                    two(TokenKind::DashBracket);
                    return;
                }
                break;
            case '=':
                if (next == '>') {
                    two(TokenKind::FatArrow);
                    return;
                }
                break;
            default: break;
        }
        std::string shown = std::isprint(static_cast<unsigned char>(c))
                                ? std::string(1, c)
                                : "\\x" + [&] {
                                      char buf[3];
                                      std::snprintf(buf, sizeof(buf), "%02x",
                                                    static_cast<unsigned char>(c));
                                      return std::string(buf, 2);
                                  }();
        diagnostics_.push_back(
            make_error("lexical error: unexpected character '" + shown + "'", span));
        advance();
    }

    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    std::vector<Token> tokens_;
    std::vector<Diagnostic> diagnostics_;
};

// Raw declarations before instantiation. Component types may forward-reference
// each other; resolution happens when the root instance is built.
struct RawSub {
    std::string name;
    std::string type_name;
    SourceSpan span;
};

struct RawRef {
    std::vector<std::string> from;
    std::vector<std::string> to;
    SourceSpan span;
};

struct RawCompType {
    Category category = Category::System;
    std::string name;
    SourceSpan span;
    std::vector<Feature> features;
    std::vector<RawSub> subs;
    std::vector<RawRef> connections;
    std::vector<RawRef> bindings;
    std::vector<RawRef> accesses;
    std::optional<ErrorModelBinding> annex;
    std::vector<StateMapping> mappings;
};

struct SyntaxError {
    std::string message;
    SourceSpan span;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic> diagnostics)
        : tokens_(std::move(tokens)), diagnostics_(std::move(diagnostics)) {}

    ParseResult run() {
        bool saw_any_declaration = false;
        std::optional<std::pair<std::string, SourceSpan>> root_ref;
        while (!at(TokenKind::End) && diagnostics_.size() < kMaxDiagnostics) {
            try {
                if (at_keyword("error")) {
                    parse_error_type();
                    saw_any_declaration = true;
                } else if (at_category()) {
                    parse_comp_type();
                    saw_any_declaration = true;
                } else if (at_keyword("root")) {
                    Token kw = consume();
                    Token name = expect_ident("component type name after 'root'");
                    expect(TokenKind::Semi, "';' after root declaration");
                    if (root_ref)
                        report("duplicate declaration: root", kw.span);
                    else
                        root_ref = {name.text, name.span};
                    saw_any_declaration = true;
                } else {
                    throw SyntaxError{"syntax error: expected component declaration",
                                      peek().span};
                }
            } catch (const SyntaxError& e) {
                report(e.message, e.span);
                synchronize();
            }
        }
        if (!root_ref && !has_errors(diagnostics_)) {
            std::string message = saw_any_declaration ? "syntax error: expected root declaration"
                                                      : "syntax error: expected component declaration";
            report(message, peek().span);
        }

        ParseResult result;
        if (!root_ref || has_errors(diagnostics_)) {
            result.diagnostics = std::move(diagnostics_);
            return result;
        }

        ArchitectureModel model;
        model.error_types = std::move(error_types_);
        Instantiator builder(comp_types_, diagnostics_);
        auto root = builder.build(root_ref->first, root_ref->second, model);
        if (!root || has_errors(diagnostics_)) {
            result.diagnostics = std::move(diagnostics_);
            return result;
        }
        model.root = std::move(*root);
        canonicalize(model);
        result.model = std::move(model);
        result.diagnostics = std::move(diagnostics_);
        return result;
    }

private:
    class Instantiator {
    public:
        Instantiator(const std::map<std::string, RawCompType>& types,
                     std::vector<Diagnostic>& diagnostics)
            : types_(types), diagnostics_(diagnostics) {}

        std::optional<ComponentInstance> build(const std::string& type_name,
                                               const SourceSpan& ref_span,
                                               ArchitectureModel& model) {
            auto it = types_.find(type_name);
            if (it == types_.end()) {
                diagnostics_.push_back(
                    make_error("unresolved reference: component type " + type_name, ref_span));
                return std::nullopt;
            }
            return instantiate(it->second, type_name, "", 0, model);
        }

    private:
        std::optional<ComponentInstance> instantiate(const RawCompType& type,
                                                     const std::string& instance_name,
                                                     const std::string& parent_path, int depth,
                                                     ArchitectureModel& model) {
            if (depth > kMaxNestingDepth) {
                diagnostics_.push_back(make_error(
                    "invalid declaration: component nesting exceeds depth " +
                        std::to_string(kMaxNestingDepth),
                    type.span));
                return std::nullopt;
            }
            if (!stack_.insert(type.name).second) {
                diagnostics_.push_back(make_error(
                    "invalid declaration: recursive component type " + type.name, type.span));
                return std::nullopt;
            }
            ComponentInstance instance;
            instance.name = instance_name;
            instance.path = parent_path.empty() ? instance_name : parent_path + "." + instance_name;
            instance.category = type.category;
            instance.features = type.features;
            instance.error_model = type.annex;
            instance.state_mappings = type.mappings;
            instance.span = type.span;
            for (const auto& sub : type.subs) {
                auto sub_type = types_.find(sub.type_name);
                if (sub_type == types_.end()) {
                    diagnostics_.push_back(make_error(
                        "unresolved reference: component type " + sub.type_name, sub.span));
                    continue;
                }
                auto child =
                    instantiate(sub_type->second, sub.name, instance.path, depth + 1, model);
                if (child) instance.subcomponents.push_back(std::move(*child));
            }
            for (const auto& raw : type.connections) {
                Connection conn;
                conn.source = split_feature_ref(instance.path, raw.from);
                conn.target = split_feature_ref(instance.path, raw.to);
                conn.span = raw.span;
                model.connections.push_back(std::move(conn));
            }
            for (const auto& raw : type.bindings) {
                Binding b;
                b.application = join_path(instance.path, raw.from);
                b.platform = join_path(instance.path, raw.to);
                b.span = raw.span;
                model.bindings.push_back(std::move(b));
            }
            for (const auto& raw : type.accesses) {
                BusAccess a;
                a.accessor = join_path(instance.path, raw.from);
                a.bus = join_path(instance.path, raw.to);
                a.span = raw.span;
                model.bus_accesses.push_back(std::move(a));
            }
            stack_.erase(type.name);
            return instance;
        }

        // Last segment is the feature; the (possibly empty) prefix is a
        // component path relative to the declaring instance.
        static ConnectionEnd split_feature_ref(const std::string& base,
                                               const std::vector<std::string>& qref) {
            ConnectionEnd end;
            end.feature = qref.back();
            std::string path = base;
            for (std::size_t i = 0; i + 1 < qref.size(); ++i) path += "." + qref[i];
            end.component = path;
            return end;
        }

        static std::string join_path(const std::string& base,
                                     const std::vector<std::string>& qref) {
            std::string path = base;
            for (const auto& segment : qref) path += "." + segment;
            return path;
        }

        const std::map<std::string, RawCompType>& types_;
        std::vector<Diagnostic>& diagnostics_;
        std::set<std::string> stack_;
    };

    static void canonicalize(ArchitectureModel& model) {
        std::sort(model.connections.begin(), model.connections.end(),
                  [](const Connection& a, const Connection& b) {
                      return std::tie(a.source.component, a.source.feature, a.target.component,
                                      a.target.feature) <
                             std::tie(b.source.component, b.source.feature, b.target.component,
                                      b.target.feature);
                  });
        std::sort(model.bindings.begin(), model.bindings.end(),
                  [](const Binding& a, const Binding& b) {
                      return std::tie(a.application, a.platform) <
                             std::tie(b.application, b.platform);
                  });
        std::sort(model.bus_accesses.begin(), model.bus_accesses.end(),
                  [](const BusAccess& a, const BusAccess& b) {
                      return std::tie(a.accessor, a.bus) < std::tie(b.accessor, b.bus);
                  });
    }

    const Token& peek(int offset = 0) const {
        std::size_t index = pos_ + static_cast<std::size_t>(offset);
        if (index >= tokens_.size()) index = tokens_.size() - 1;
        return tokens_[index];
    }

    bool at(TokenKind kind) const { return peek().kind == kind; }

    bool at_keyword(std::string_view kw) const {
        return peek().kind == TokenKind::Ident && peek().text == kw;
    }

    bool at_category() const {
        if (peek().kind != TokenKind::Ident) return false;
        return category_of(peek().text).has_value();
    }

    static std::optional<Category> category_of(std::string_view word) {
        if (word == "system") return Category::System;
        if (word == "process") return Category::Process;
        if (word == "thread") return Category::Thread;
        if (word == "processor") return Category::Processor;
        if (word == "memory") return Category::Memory;
        if (word == "bus") return Category::Bus;
        if (word == "device") return Category::Device;
        if (word == "data") return Category::Data;
        return std::nullopt;
    }

    Token consume() {
        Token t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    Token expect(TokenKind kind, const std::string& what) {
        if (!at(kind))
            throw SyntaxError{"syntax error: expected " + what + ", found " +
                                  token_kind_name(peek().kind),
                              peek().span};
        return consume();
    }

    Token expect_ident(const std::string& what) { return expect(TokenKind::Ident, what); }

    Token expect_keyword(std::string_view kw, const std::string& what) {
        if (!at_keyword(kw))
            throw SyntaxError{"syntax error: expected " + what, peek().span};
        return consume();
    }

    void report(std::string message, const SourceSpan& span) {
        if (diagnostics_.size() < kMaxDiagnostics)
            diagnostics_.push_back(make_error(std::move(message), span));
    }

    // Panic-mode recovery: skip to the next ';' or balanced '}'.
    void synchronize() {
        int depth = 0;
        while (!at(TokenKind::End)) {
            TokenKind k = peek().kind;
            if (k == TokenKind::Semi && depth == 0) {
                consume();
                return;
            }
            if (k == TokenKind::LBrace) ++depth;
            if (k == TokenKind::RBrace) {
                if (depth == 0) {
                    consume();
                    return;
                }
                --depth;
            }
            consume();
        }
    }

    Occurrence parse_occurrence() {
        if (at_keyword("poisson")) {
            consume();
            Token value = expect(TokenKind::Number, "rate after 'poisson'");
            return Occurrence::poisson(value.number);
        }
        if (at_keyword("fixed")) {
            consume();
            Token value = expect(TokenKind::Number, "probability after 'fixed'");
            return Occurrence::fixed(value.number);
        }
        throw SyntaxError{"syntax error: expected 'poisson' or 'fixed'", peek().span};
    }

    void parse_error_type() {
        consume(); // error
        expect_keyword("model", "'model' after 'error'");
        Token name = expect_ident("error model name");
        ErrorModelType type;
        type.name = name.text;
        type.span = name.span;
        expect(TokenKind::LBrace, "'{' after error model name");

        expect_keyword("states", "'states' section");
        expect(TokenKind::LBrace, "'{' after 'states'");
        std::set<std::string> state_names;
        while (at(TokenKind::Ident)) {
            Token state_name = consume();
            ErrorState state;
            state.name = state_name.text;
            state.span = state_name.span;
            if (at(TokenKind::Colon)) {
                consume();
                expect_keyword("initial", "'initial' after ':'");
                state.is_initial = true;
            }
            expect(TokenKind::Semi, "';' after state declaration");
            if (!state_names.insert(state.name).second)
                report("duplicate declaration: state " + state.name + " in error model " +
                           type.name,
                       state.span);
            type.states.push_back(std::move(state));
        }
        expect(TokenKind::RBrace, "'}' after states");

        expect_keyword("events", "'events' section");
        expect(TokenKind::LBrace, "'{' after 'events'");
        std::set<std::string> event_names;
        while (at(TokenKind::Ident)) {
            Token event_name = consume();
            ErrorEvent event;
            event.name = event_name.text;
            event.span = event_name.span;
            if (at_keyword("occurrence")) {
                consume();
                event.default_occurrence = parse_occurrence();
            }
            expect(TokenKind::Semi, "';' after event declaration");
            if (!event_names.insert(event.name).second)
                report("duplicate declaration: event " + event.name + " in error model " +
                           type.name,
                       event.span);
            type.events.push_back(std::move(event));
        }
        expect(TokenKind::RBrace, "'}' after events");

        expect_keyword("propagations", "'propagations' section");
        expect(TokenKind::LBrace, "'{' after 'propagations'");
        std::set<std::string> prop_names;
        while (at(TokenKind::Ident)) {
            Token prop_name = consume();
            ErrorPropagation prop;
            prop.name = prop_name.text;
            prop.span = prop_name.span;
            expect(TokenKind::Colon, "':' after propagation name");
            if (at_keyword("in"))
                prop.direction = Direction::In;
            else if (at_keyword("out"))
                prop.direction = Direction::Out;
            else
                throw SyntaxError{"syntax error: expected 'in' or 'out'", peek().span};
            consume();
            if (at_keyword("occurrence")) {
                consume();
                prop.default_occurrence = parse_occurrence();
            }
            expect(TokenKind::Semi, "';' after propagation declaration");
            if (!prop_names.insert(prop.name).second)
                report("duplicate declaration: propagation " + prop.name + " in error model " +
                           type.name,
                       prop.span);
            type.propagations.push_back(std::move(prop));
        }
        expect(TokenKind::RBrace, "'}' after propagations");

        expect_keyword("transitions", "'transitions' section");
        expect(TokenKind::LBrace, "'{' after 'transitions'");
        while (at(TokenKind::Ident)) {
            Token source = consume();
            expect(TokenKind::DashBracket, "'-[' after transition source");
            ErrorTransition transition;
            transition.source = source.text;
            transition.span = source.span;
            if (at_keyword("in") && peek(1).kind == TokenKind::Ident) {
                consume();
                transition.trigger_kind = TriggerKind::InPropagation;
                transition.trigger = expect_ident("propagation name").text;
            } else if (at_keyword("out") && peek(1).kind == TokenKind::Ident) {
                consume();
                transition.trigger_kind = TriggerKind::OutPropagation;
                transition.trigger = expect_ident("propagation name").text;
            } else {
                transition.trigger_kind = TriggerKind::Event;
                transition.trigger = expect_ident("trigger name").text;
            }
            expect(TokenKind::BracketArrow, "']->' after trigger");
            transition.destination = expect_ident("transition destination").text;
            expect(TokenKind::Semi, "';' after transition");
            check_transition_refs(type, transition, state_names, event_names, prop_names);
            type.transitions.push_back(std::move(transition));
        }
        expect(TokenKind::RBrace, "'}' after transitions");
        expect(TokenKind::RBrace, "'}' after error model body");

        if (error_types_.count(type.name))
            report("duplicate declaration: error model " + type.name, name.span);
        else
            error_types_.emplace(type.name, std::move(type));
    }

    void check_transition_refs(const ErrorModelType& type, const ErrorTransition& t,
                               const std::set<std::string>& states,
                               const std::set<std::string>& events,
                               const std::set<std::string>& props) {
        if (!states.count(t.source)) report("unresolved reference: state " + t.source, t.span);
        if (!states.count(t.destination))
            report("unresolved reference: state " + t.destination, t.span);
        if (t.trigger_kind == TriggerKind::Event) {
            if (!events.count(t.trigger)) report("unresolved reference: event " + t.trigger, t.span);
        } else if (!props.count(t.trigger)) {
            report("unresolved reference: propagation " + t.trigger, t.span);
        }
        (void)type;
    }

    void parse_comp_type() {
        Token category_token = consume();
        Category category = *category_of(category_token.text);
        Token name = expect_ident("component type name");
        RawCompType type;
        type.category = category;
        type.name = name.text;
        type.span = name.span;
        expect(TokenKind::LBrace, "'{' after component type name");
        std::set<std::string> feature_names;
        std::set<std::string> sub_names;
        std::set<std::string> mapping_labels;
        while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
            if (at_keyword("feature")) {
                consume();
                Token feature_name = expect_ident("feature name");
                expect(TokenKind::Colon, "':' after feature name");
                Feature feature;
                feature.name = feature_name.text;
                feature.span = feature_name.span;
                if (at_keyword("in"))
                    feature.direction = Direction::In;
                else if (at_keyword("out"))
                    feature.direction = Direction::Out;
                else
                    throw SyntaxError{"syntax error: expected 'in' or 'out'", peek().span};
                consume();
                expect_keyword("port", "'port' after feature direction");
                expect(TokenKind::Semi, "';' after feature declaration");
                if (!feature_names.insert(feature.name).second)
                    report("duplicate declaration: feature " + feature.name + " in " + type.name,
                           feature.span);
                type.features.push_back(std::move(feature));
            } else if (at_keyword("sub")) {
                consume();
                Token sub_name = expect_ident("subcomponent name");
                expect(TokenKind::Colon, "':' after subcomponent name");
                Token sub_type = expect_ident("component type name");
                expect(TokenKind::Semi, "';' after subcomponent declaration");
                if (!sub_names.insert(sub_name.text).second)
                    report("duplicate declaration: subcomponent " + sub_name.text + " in " +
                               type.name,
                           sub_name.span);
                type.subs.push_back(RawSub{sub_name.text, sub_type.text, sub_name.span});
            } else if (at_keyword("connect")) {
                type.connections.push_back(parse_ref_stmt());
            } else if (at_keyword("bind")) {
                type.bindings.push_back(parse_ref_stmt());
            } else if (at_keyword("access")) {
                type.accesses.push_back(parse_ref_stmt());
            } else if (at_keyword("annex")) {
                Token kw = consume();
                expect_keyword("error_model", "'error_model' after 'annex'");
                if (type.annex) report("duplicate declaration: error model annex", kw.span);
                type.annex = parse_annex(kw.span);
            } else if (at_keyword("state_mapping")) {
                consume();
                Token label = expect_ident("state mapping label");
                expect(TokenKind::FatArrow, "'=>' after state mapping label");
                StateMapping mapping;
                mapping.label = label.text;
                mapping.span = label.span;
                mapping.expr = parse_expr(0);
                expect(TokenKind::Semi, "';' after state mapping");
                if (!mapping_labels.insert(mapping.label).second)
                    report("duplicate declaration: state mapping label " + mapping.label +
                               " in " + type.name,
                           label.span);
                type.mappings.push_back(std::move(mapping));
            } else {
                throw SyntaxError{"syntax error: expected component member, found " +
                                      std::string(token_kind_name(peek().kind)),
                                  peek().span};
            }
        }
        expect(TokenKind::RBrace, "'}' after component body");
        if (comp_types_.count(type.name))
            report("duplicate declaration: component type " + type.name, name.span);
        else
            comp_types_.emplace(type.name, std::move(type));
    }

    RawRef parse_ref_stmt() {
        Token kw = consume();
        RawRef ref;
        ref.span = kw.span;
        ref.from = parse_qref();
        expect(TokenKind::Arrow, "'->' in " + kw.text + " declaration");
        ref.to = parse_qref();
        expect(TokenKind::Semi, "';' after " + kw.text + " declaration");
        return ref;
    }

    std::vector<std::string> parse_qref() {
        std::vector<std::string> segments;
        segments.push_back(expect_ident("qualified name").text);
        while (at(TokenKind::Dot)) {
            consume();
            segments.push_back(expect_ident("name after '.'").text);
        }
        return segments;
    }

    ErrorModelBinding parse_annex(const SourceSpan& span) {
        ErrorModelBinding binding;
        binding.span = span;
        expect(TokenKind::LBrace, "'{' after 'error_model'");
        expect_keyword("use", "'use' in error model annex");
        binding.type_name = expect_ident("error model type name").text;
        expect(TokenKind::Semi, "';' after 'use'");
        while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
            if (at_keyword("occurrence")) {
                consume();
                Token key = expect_ident("event or propagation name");
                expect(TokenKind::FatArrow, "'=>' in occurrence override");
                Occurrence occurrence = parse_occurrence();
                expect(TokenKind::Semi, "';' after occurrence override");
                if (binding.occurrence_overrides.count(key.text))
                    report("duplicate declaration: occurrence override " + key.text, key.span);
                binding.occurrence_overrides[key.text] = occurrence;
            } else if (at_keyword("guard_in")) {
                Token kw = consume();
                GuardInRule rule;
                rule.span = kw.span;
                expect(TokenKind::LParen, "'(' after 'guard_in'");
                rule.condition.push_back(expect_ident("propagation name").text);
                while (at_keyword("or")) {
                    consume();
                    rule.condition.push_back(expect_ident("propagation name").text);
                }
                expect(TokenKind::RParen, "')' after guard condition");
                expect_keyword("on", "'on' after guard condition");
                rule.feature = expect_ident("feature name").text;
                expect(TokenKind::FatArrow, "'=>' in guard_in rule");
                if (at_keyword("raise")) {
                    consume();
                    rule.raise = expect_ident("propagation name").text;
                } else if (at_keyword("mask")) {
                    consume();
                    rule.mask = true;
                } else {
                    throw SyntaxError{"syntax error: expected 'raise' or 'mask'", peek().span};
                }
                expect(TokenKind::Semi, "';' after guard_in rule");
                binding.guard_in_rules.push_back(std::move(rule));
            } else {
                throw SyntaxError{"syntax error: expected 'occurrence' or 'guard_in'",
                                  peek().span};
            }
        }
        expect(TokenKind::RBrace, "'}' after error model annex");
        return binding;
    }

    // expr := or_expr; precedence not > and > or, left-associative.
    StateExpr parse_expr(int depth) {
        if (depth > kMaxExprDepth)
            throw SyntaxError{"syntax error: expression too deeply nested", peek().span};
        StateExpr lhs = parse_and(depth);
        while (at_keyword("or")) {
            consume();
            StateExpr rhs = parse_and(depth);
            lhs = StateExpr::disjunction(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    StateExpr parse_and(int depth) {
        StateExpr lhs = parse_not(depth);
        while (at_keyword("and")) {
            consume();
            StateExpr rhs = parse_not(depth);
            lhs = StateExpr::conjunction(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    StateExpr parse_not(int depth) {
        if (depth > kMaxExprDepth)
            throw SyntaxError{"syntax error: expression too deeply nested", peek().span};
        if (at_keyword("not")) {
            Token kw = consume();
            StateExpr operand = parse_not(depth + 1);
            StateExpr e = StateExpr::negation(std::move(operand));
            e.span = kw.span;
            return e;
        }
        return parse_primary(depth);
    }

    StateExpr parse_primary(int depth) {
        if (at(TokenKind::LParen)) {
            consume();
            StateExpr inner = parse_expr(depth + 1);
            expect(TokenKind::RParen, "')' in state expression");
            return inner;
        }
        Token first = expect_ident("component path in state expression");
        std::string path = first.text;
        while (at(TokenKind::Dot)) {
            consume();
            path += "." + expect_ident("name after '.'").text;
        }
        expect(TokenKind::LBracket, "'[' after component path");
        Token state = expect_ident("state name");
        expect(TokenKind::RBracket, "']' after state name");
        StateExpr atom = StateExpr::atom(std::move(path), state.text);
        atom.span = first.span;
        return atom;
    }

    std::vector<Token> tokens_;
    std::vector<Diagnostic> diagnostics_;
    std::size_t pos_ = 0;
    std::map<std::string, ErrorModelType> error_types_;
    std::map<std::string, RawCompType> comp_types_;

public:
    // Entry point for the standalone expression parser.
    std::pair<std::optional<StateExpr>, std::optional<Diagnostic>> run_expr_only() {
        try {
            StateExpr expr = parse_expr(0);
            if (!at(TokenKind::End))
                throw SyntaxError{"syntax error: unexpected input after expression", peek().span};
            if (!diagnostics_.empty()) return {std::nullopt, diagnostics_.front()};
            return {std::move(expr), std::nullopt};
        } catch (const SyntaxError& e) {
            return {std::nullopt, make_error(e.message, e.span)};
        }
    }
};

} // namespace

ParseResult parse_model(std::string_view text, const std::string& file_name) {
    auto [tokens, lex_diagnostics] = Lexer(text, file_name).run();
    return Parser(std::move(tokens), std::move(lex_diagnostics)).run();
}

ExprParseResult parse_state_mapping_expr(std::string_view text) {
    auto [tokens, lex_diagnostics] = Lexer(text, "<expr>").run();
    if (!lex_diagnostics.empty()) return {std::nullopt, lex_diagnostics.front()};
    Parser parser(std::move(tokens), {});
    auto [expr, diagnostic] = parser.run_expr_only();
    return {std::move(expr), std::move(diagnostic)};
}

namespace {

int expr_precedence(StateExpr::Kind kind) {
    switch (kind) {
        case StateExpr::Kind::Or: return 1;
        case StateExpr::Kind::And: return 2;
        case StateExpr::Kind::Not: return 3;
        case StateExpr::Kind::Atom: return 4;
    }
    return 4;
}

void print_expr(const StateExpr& e, int parent_precedence, std::string& out) {
    int precedence = expr_precedence(e.kind);
    bool parens = precedence < parent_precedence;
    if (parens) out += "(";
    switch (e.kind) {
        case StateExpr::Kind::Atom:
            out += e.component + "[" + e.state + "]";
            break;
        case StateExpr::Kind::Not:
            out += "not ";
            print_expr(e.children[0], precedence, out);
            break;
        case StateExpr::Kind::And:
            print_expr(e.children[0], precedence, out);
            out += " and ";
            print_expr(e.children[1], precedence + 1, out);
            break;
        case StateExpr::Kind::Or:
            print_expr(e.children[0], precedence, out);
            out += " or ";
            print_expr(e.children[1], precedence + 1, out);
            break;
    }
    if (parens) out += ")";
}

void print_occurrence(const Occurrence& o, std::string& out) {
    out += occurrence_display(o);
}

void print_error_type(const ErrorModelType& type, std::string& out) {
    out += "error model " + type.name + " {\n";
    out += "  states {";
    for (const auto& s : type.states) {
        out += " " + s.name;
        if (s.is_initial) out += " : initial";
        out += ";";
    }
    out += " }\n  events {";
    for (const auto& e : type.events) {
        out += " " + e.name;
        if (e.default_occurrence) {
            out += " occurrence ";
            print_occurrence(*e.default_occurrence, out);
        }
        out += ";";
    }
    out += " }\n  propagations {";
    for (const auto& p : type.propagations) {
        out += " " + p.name + " : " + std::string(direction_name(p.direction));
        if (p.default_occurrence) {
            out += " occurrence ";
            print_occurrence(*p.default_occurrence, out);
        }
        out += ";";
    }
    out += " }\n  transitions {";
    for (const auto& t : type.transitions) {
        out += " " + t.source + " -[";
        if (t.trigger_kind == TriggerKind::InPropagation) out += "in ";
        if (t.trigger_kind == TriggerKind::OutPropagation) out += "out ";
        out += t.trigger + "]-> " + t.destination + ";";
    }
    out += " }\n}\n";
}

class ModelPrinter {
public:
    explicit ModelPrinter(const ArchitectureModel& model) : model_(model) {}

    std::string run() {
        for (const auto& [name, type] : model_.error_types) print_error_type(type, out_);
        assign_type_names(model_.root, true);
        print_component(model_.root);
        out_ += "root " + type_names_.at(model_.root.path) + ";\n";
        return std::move(out_);
    }

private:
    void assign_type_names(const ComponentInstance& c, bool is_root) {
        std::string base = is_root ? c.name : [&] {
            std::string s = c.path;
            std::replace(s.begin(), s.end(), '.', '_');
            return s + "_t";
        }();
        std::string name = base;
        int suffix = 2;
        while (!used_names_.insert(name).second) name = base + "_" + std::to_string(suffix++);
        type_names_[c.path] = name;
        for (const auto& sub : c.subcomponents) assign_type_names(sub, false);
    }

    std::string relative_ref(const std::string& path) const {
        if (path == model_.root.path) return "";
        return path.substr(model_.root.path.size() + 1);
    }

    void print_component(const ComponentInstance& c) {
        for (const auto& sub : c.subcomponents) print_component(sub);
        out_ += std::string(category_name(c.category)) + " " + type_names_.at(c.path) + " {\n";
        for (const auto& f : c.features)
            out_ += "  feature " + f.name + " : " + std::string(direction_name(f.direction)) +
                    " port;\n";
        for (const auto& sub : c.subcomponents)
            out_ += "  sub " + sub.name + " : " + type_names_.at(sub.path) + ";\n";
        if (c.error_model) {
            const auto& binding = *c.error_model;
            out_ += "  annex error_model {\n    use " + binding.type_name + ";\n";
            for (const auto& [key, occurrence] : binding.occurrence_overrides) {
                out_ += "    occurrence " + key + " => ";
                print_occurrence(occurrence, out_);
                out_ += ";\n";
            }
            for (const auto& rule : binding.guard_in_rules) {
                out_ += "    guard_in (";
                for (std::size_t i = 0; i < rule.condition.size(); ++i) {
                    if (i) out_ += " or ";
                    out_ += rule.condition[i];
                }
                out_ += ") on " + rule.feature + " => ";
                out_ += rule.mask ? "mask" : "raise " + rule.raise;
                out_ += ";\n";
            }
            out_ += "  }\n";
        }
        for (const auto& m : c.state_mappings) {
            out_ += "  state_mapping " + m.label + " => ";
            print_expr(m.expr, 0, out_);
            out_ += ";\n";
        }
        // All reference declarations are emitted in the root block with
        // root-relative paths; instantiation re-flattens them identically.
        if (c.path == model_.root.path) {
            for (const auto& conn : model_.connections) {
                std::string from = relative_ref(conn.source.component);
                std::string to = relative_ref(conn.target.component);
                out_ += "  connect " + (from.empty() ? conn.source.feature
                                                     : from + "." + conn.source.feature) +
                        " -> " +
                        (to.empty() ? conn.target.feature : to + "." + conn.target.feature) +
                        ";\n";
            }
            for (const auto& b : model_.bindings)
                out_ += "  bind " + relative_ref(b.application) + " -> " +
                        relative_ref(b.platform) + ";\n";
            for (const auto& a : model_.bus_accesses)
                out_ += "  access " + relative_ref(a.accessor) + " -> " + relative_ref(a.bus) +
                        ";\n";
        }
        out_ += "}\n";
    }

    const ArchitectureModel& model_;
    std::string out_;
    std::map<std::string, std::string> type_names_;
    std::set<std::string> used_names_;
};

} // namespace

std::string print_model(const ArchitectureModel& model) {
    return ModelPrinter(model).run();
}

std::string print_state_expr(const StateExpr& expr) {
    std::string out;
    print_expr(expr, 0, out);
    return out;
}

} // namespace adaptkit
