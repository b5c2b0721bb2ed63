#include "adaptkit/model.hpp"

#include <algorithm>
#include <set>

#include "adaptkit/errors.hpp"
#include "adaptkit/text.hpp"

namespace adaptkit {

std::string_view category_name(Category c) {
    switch (c) {
        case Category::System: return "system";
        case Category::Process: return "process";
        case Category::Thread: return "thread";
        case Category::Processor: return "processor";
        case Category::Memory: return "memory";
        case Category::Bus: return "bus";
        case Category::Device: return "device";
        case Category::Data: return "data";
    }
    return "?";
}

std::string_view direction_name(Direction d) {
    return d == Direction::In ? "in" : "out";
}

bool operator==(const Occurrence& a, const Occurrence& b) {
    return a.kind == b.kind && a.value == b.value;
}

std::string occurrence_display(const Occurrence& o) {
    std::string kind = o.kind == Occurrence::Kind::Poisson ? "poisson " : "fixed ";
    return kind + format_double(o.value);
}

std::string trigger_display(const ErrorTransition& t) {
    switch (t.trigger_kind) {
        case TriggerKind::Event: return t.trigger;
        case TriggerKind::InPropagation: return "in " + t.trigger;
        case TriggerKind::OutPropagation: return "out " + t.trigger;
    }
    return t.trigger;
}

const ErrorState* ErrorModelType::find_state(std::string_view state_name) const {
    for (const auto& s : states)
        if (s.name == state_name) return &s;
    return nullptr;
}

const ErrorEvent* ErrorModelType::find_event(std::string_view event_name) const {
    for (const auto& e : events)
        if (e.name == event_name) return &e;
    return nullptr;
}

const ErrorPropagation* ErrorModelType::find_propagation(std::string_view prop_name) const {
    for (const auto& p : propagations)
        if (p.name == prop_name) return &p;
    return nullptr;
}

StateExpr StateExpr::atom(std::string component, std::string state) {
    StateExpr e;
    e.kind = Kind::Atom;
    e.component = std::move(component);
    e.state = std::move(state);
    return e;
}

StateExpr StateExpr::conjunction(StateExpr lhs, StateExpr rhs) {
    StateExpr e;
    e.kind = Kind::And;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}

StateExpr StateExpr::disjunction(StateExpr lhs, StateExpr rhs) {
    StateExpr e;
    e.kind = Kind::Or;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}

StateExpr StateExpr::negation(StateExpr operand) {
    StateExpr e;
    e.kind = Kind::Not;
    e.children.push_back(std::move(operand));
    return e;
}

void StateExpr::collect_atoms(std::vector<const StateExpr*>& out) const {
    if (kind == Kind::Atom) {
        out.push_back(this);
        return;
    }
    for (const auto& child : children) child.collect_atoms(out);
}

const Feature* ComponentInstance::find_feature(std::string_view feature_name) const {
    for (const auto& f : features)
        if (f.name == feature_name) return &f;
    return nullptr;
}

const StateMapping* ComponentInstance::find_mapping(std::string_view label) const {
    for (const auto& m : state_mappings)
        if (m.label == label) return &m;
    return nullptr;
}

std::string Connection::display() const {
    return source.component + "." + source.feature + " -> " + target.component + "." +
           target.feature;
}

const ComponentInstance* ArchitectureModel::find_component(std::string_view path) const {
    auto segments = split(path, '.');
    if (segments.empty() || segments.front() != root.name) return nullptr;
    const ComponentInstance* current = &root;
    for (std::size_t i = 1; i < segments.size(); ++i) {
        const ComponentInstance* next = nullptr;
        for (const auto& sub : current->subcomponents) {
            if (sub.name == segments[i]) {
                next = &sub;
                break;
            }
        }
        if (!next) return nullptr;
        current = next;
    }
    return current;
}

std::string ArchitectureModel::display_path(std::string_view path) const {
    if (path == root.path) return root.name;
    std::string prefix = root.path + ".";
    if (path.size() > prefix.size() && path.substr(0, prefix.size()) == prefix)
        return std::string(path.substr(prefix.size()));
    return std::string(path);
}

const std::string& ErrorModelInstance::initial_state() const {
    for (const auto& s : states)
        if (s.is_initial) return s.name;
    throw ContractError("error model instance of " + owner + " has no initial state");
}

const Occurrence& ErrorModelInstance::occurrence_of(std::string_view trigger_name) const {
    auto it = effective_occurrences.find(std::string(trigger_name));
    if (it == effective_occurrences.end())
        throw ContractError("no effective occurrence for trigger " + std::string(trigger_name) +
                            " on " + owner);
    return it->second;
}

bool operator==(const Feature& a, const Feature& b) {
    return a.name == b.name && a.direction == b.direction;
}

bool operator==(const ErrorState& a, const ErrorState& b) {
    return a.name == b.name && a.is_initial == b.is_initial;
}

bool operator==(const ErrorEvent& a, const ErrorEvent& b) {
    return a.name == b.name && a.default_occurrence == b.default_occurrence;
}

bool operator==(const ErrorPropagation& a, const ErrorPropagation& b) {
    return a.name == b.name && a.direction == b.direction &&
           a.default_occurrence == b.default_occurrence;
}

bool operator==(const ErrorTransition& a, const ErrorTransition& b) {
    return a.source == b.source && a.trigger_kind == b.trigger_kind && a.trigger == b.trigger &&
           a.destination == b.destination;
}

bool operator==(const ErrorModelType& a, const ErrorModelType& b) {
    return a.name == b.name && a.states == b.states && a.events == b.events &&
           a.propagations == b.propagations && a.transitions == b.transitions;
}

bool operator==(const GuardInRule& a, const GuardInRule& b) {
    return a.feature == b.feature && a.condition == b.condition && a.mask == b.mask &&
           a.raise == b.raise;
}

bool operator==(const ErrorModelBinding& a, const ErrorModelBinding& b) {
    return a.type_name == b.type_name && a.occurrence_overrides == b.occurrence_overrides &&
           a.guard_in_rules == b.guard_in_rules;
}

bool operator==(const StateExpr& a, const StateExpr& b) {
    return a.kind == b.kind && a.component == b.component && a.state == b.state &&
           a.children == b.children;
}

bool operator==(const StateMapping& a, const StateMapping& b) {
    return a.label == b.label && a.expr == b.expr;
}

bool operator==(const ComponentInstance& a, const ComponentInstance& b) {
    return a.name == b.name && a.path == b.path && a.category == b.category &&
           a.features == b.features && a.subcomponents == b.subcomponents &&
           a.error_model == b.error_model && a.state_mappings == b.state_mappings;
}

bool operator==(const Connection& a, const Connection& b) {
    return a.source.component == b.source.component && a.source.feature == b.source.feature &&
           a.target.component == b.target.component && a.target.feature == b.target.feature;
}

bool operator==(const Binding& a, const Binding& b) {
    return a.application == b.application && a.platform == b.platform;
}

bool operator==(const BusAccess& a, const BusAccess& b) {
    return a.accessor == b.accessor && a.bus == b.bus;
}

bool operator==(const ArchitectureModel& a, const ArchitectureModel& b) {
    return a.error_types == b.error_types && a.root == b.root && a.connections == b.connections &&
           a.bindings == b.bindings && a.bus_accesses == b.bus_accesses;
}

bool operator==(const ErrorModelInstance& a, const ErrorModelInstance& b) {
    return a.owner == b.owner && a.type_name == b.type_name && a.states == b.states &&
           a.events == b.events && a.propagations == b.propagations &&
           a.transitions == b.transitions && a.effective_occurrences == b.effective_occurrences;
}

std::optional<ErrorModelInstance> resolve_error_model(const ComponentInstance& component,
                                                      const ArchitectureModel& model) {
    if (!component.error_model) return std::nullopt;
    const auto& binding = *component.error_model;
    auto type_it = model.error_types.find(binding.type_name);
    if (type_it == model.error_types.end())
        throw ContractError("error model type " + binding.type_name +
                            " not found for component " + component.path);
    const ErrorModelType& type = type_it->second;

    ErrorModelInstance instance;
    instance.owner = component.path;
    instance.type_name = type.name;
    instance.states = type.states;
    instance.events = type.events;
    instance.propagations = type.propagations;
    instance.transitions = type.transitions;

    auto effective = [&](const std::string& name,
                         const std::optional<Occurrence>& type_default) -> Occurrence {
        auto override_it = binding.occurrence_overrides.find(name);
        if (override_it != binding.occurrence_overrides.end()) return override_it->second;
        if (type_default) return *type_default;
        return Occurrence::fixed(1.0);
    };

    for (const auto& e : type.events)
        instance.effective_occurrences[e.name] = effective(e.name, e.default_occurrence);
    for (const auto& p : type.propagations)
        if (p.direction == Direction::Out)
            instance.effective_occurrences[p.name] = effective(p.name, p.default_occurrence);

    return instance;
}

bool evaluate_state_expr(const StateExpr& expr,
                         const std::map<std::string, std::string>& assignment) {
    switch (expr.kind) {
        case StateExpr::Kind::Atom: {
            auto it = assignment.find(expr.component);
            if (it == assignment.end())
                throw ContractError("state expression atom " + expr.component + "[" + expr.state +
                                    "] references a component with no assigned state");
            return it->second == expr.state;
        }
        case StateExpr::Kind::And:
            return evaluate_state_expr(expr.children[0], assignment) &&
                   evaluate_state_expr(expr.children[1], assignment);
        case StateExpr::Kind::Or:
            return evaluate_state_expr(expr.children[0], assignment) ||
                   evaluate_state_expr(expr.children[1], assignment);
        case StateExpr::Kind::Not:
            return !evaluate_state_expr(expr.children[0], assignment);
    }
    throw ContractError("malformed state expression node");
}

namespace {

class Validator {
public:
    explicit Validator(const ArchitectureModel& model) : model_(model) {}

    std::vector<Diagnostic> run() {
        check_root();
        check_component(model_.root);
        check_error_types();
        check_connections();
        check_bindings();
        check_bus_accesses();
        return std::move(diagnostics_);
    }

private:
    void error(std::string message, const SourceSpan& span) {
        diagnostics_.push_back(make_error(std::move(message), span));
    }

    void check_root() {
        const auto& root = model_.root;
        if (root.category != Category::System)
            error("category mismatch: root component " + root.name + " must be a system",
                  root.span);
        if (!root.find_mapping("failed"))
            error("missing failed mapping: root system " + root.name +
                      " must define state mapping label failed",
                  root.span);
    }

    void check_component(const ComponentInstance& c) {
        std::set<std::string_view> sub_names;
        for (const auto& sub : c.subcomponents) {
            if (!sub_names.insert(sub.name).second)
                error("duplicate declaration: subcomponent " + sub.name + " in " + c.path,
                      sub.span);
        }
        std::set<std::string_view> feature_names;
        for (const auto& f : c.features) {
            if (!feature_names.insert(f.name).second)
                error("duplicate declaration: feature " + f.name + " in " + c.path, f.span);
        }
        if (!c.state_mappings.empty() && c.subcomponents.empty())
            error("invalid state mapping: component " + c.path + " has no subcomponents",
                  c.state_mappings.front().span);
        std::set<std::string_view> labels;
        for (const auto& m : c.state_mappings) {
            if (!labels.insert(m.label).second)
                error("duplicate declaration: state mapping label " + m.label + " in " + c.path,
                      m.span);
            check_mapping_expr(c, m.expr);
        }
        if (c.error_model) check_binding_annex(c, *c.error_model);
        for (const auto& sub : c.subcomponents) check_component(sub);
    }

    void check_mapping_expr(const ComponentInstance& owner, const StateExpr& expr) {
        std::vector<const StateExpr*> atoms;
        expr.collect_atoms(atoms);
        for (const StateExpr* atom : atoms) {
            const ComponentInstance* target = resolve_descendant(owner, atom->component);
            if (!target) {
                error("invalid state mapping: component " + atom->component +
                          " not found under " + owner.path,
                      atom->span);
                continue;
            }
            if (!target->error_model) {
                error("invalid state mapping: component " + atom->component +
                          " has no error model",
                      atom->span);
                continue;
            }
            auto type_it = model_.error_types.find(target->error_model->type_name);
            if (type_it == model_.error_types.end()) continue; // reported by annex check
            if (!type_it->second.find_state(atom->state))
                error("invalid state mapping: state " + atom->state +
                          " not declared in error model of " + atom->component,
                      atom->span);
        }
    }

    const ComponentInstance* resolve_descendant(const ComponentInstance& owner,
                                                std::string_view relative_path) const {
        const ComponentInstance* current = &owner;
        for (const auto& segment : split(relative_path, '.')) {
            const ComponentInstance* next = nullptr;
            for (const auto& sub : current->subcomponents) {
                if (sub.name == segment) {
                    next = &sub;
                    break;
                }
            }
            if (!next) return nullptr;
            current = next;
        }
        return current;
    }

    void check_occurrence_value(const Occurrence& o, const SourceSpan& span,
                                const std::string& context) {
        if (o.kind == Occurrence::Kind::Poisson && !(o.value > 0.0))
            error("invalid occurrence: poisson rate must be positive for " + context, span);
        if (o.kind == Occurrence::Kind::Fixed && !(o.value >= 0.0 && o.value <= 1.0))
            error("invalid occurrence: fixed probability must be in [0,1] for " + context, span);
    }

    void check_error_types() {
        for (const auto& [name, type] : model_.error_types) {
            int initial_count = 0;
            std::set<std::string_view> seen;
            for (const auto& s : type.states) {
                if (s.is_initial) ++initial_count;
                if (!seen.insert(s.name).second)
                    error("duplicate declaration: state " + s.name + " in error model " + name,
                          s.span);
            }
            if (initial_count != 1)
                error("invalid error model: " + name +
                          " must declare exactly one initial state (found " +
                          std::to_string(initial_count) + ")",
                      type.span);
            std::set<std::string_view> event_names;
            for (const auto& e : type.events) {
                if (!event_names.insert(e.name).second)
                    error("duplicate declaration: event " + e.name + " in error model " + name,
                          e.span);
                if (e.default_occurrence)
                    check_occurrence_value(*e.default_occurrence, e.span,
                                           "event " + e.name + " of " + name);
            }
            std::set<std::string_view> prop_names;
            for (const auto& p : type.propagations) {
                if (!prop_names.insert(p.name).second)
                    error("duplicate declaration: propagation " + p.name + " in error model " +
                              name,
                          p.span);
                if (p.direction == Direction::In && p.default_occurrence)
                    error("invalid occurrence: in propagation " + p.name +
                              " must not declare an occurrence",
                          p.span);
                if (p.default_occurrence)
                    check_occurrence_value(*p.default_occurrence, p.span,
                                           "propagation " + p.name + " of " + name);
            }
            for (const auto& t : type.transitions) check_transition(type, t);
        }
    }

    void check_transition(const ErrorModelType& type, const ErrorTransition& t) {
        if (!type.find_state(t.source))
            error("unresolved reference: state " + t.source, t.span);
        if (!type.find_state(t.destination))
            error("unresolved reference: state " + t.destination, t.span);
        switch (t.trigger_kind) {
            case TriggerKind::Event:
                if (!type.find_event(t.trigger))
                    error("unresolved reference: event " + t.trigger, t.span);
                break;
            case TriggerKind::InPropagation:
            case TriggerKind::OutPropagation: {
                const ErrorPropagation* p = type.find_propagation(t.trigger);
                if (!p) {
                    error("unresolved reference: propagation " + t.trigger, t.span);
                    break;
                }
                Direction used = t.trigger_kind == TriggerKind::InPropagation ? Direction::In
                                                                              : Direction::Out;
                if (p->direction != used)
                    error("direction mismatch: propagation " + t.trigger + " is declared " +
                              std::string(direction_name(p->direction)) + " but used as an " +
                              std::string(direction_name(used)) + " trigger",
                          t.span);
                break;
            }
        }
    }

    void check_binding_annex(const ComponentInstance& c, const ErrorModelBinding& binding) {
        auto type_it = model_.error_types.find(binding.type_name);
        if (type_it == model_.error_types.end()) {
            error("unresolved reference: error model " + binding.type_name, binding.span);
            return;
        }
        const ErrorModelType& type = type_it->second;
        for (const auto& [key, occurrence] : binding.occurrence_overrides) {
            const ErrorPropagation* p = type.find_propagation(key);
            if (!type.find_event(key) && !p) {
                error("unresolved reference: event or propagation " + key, binding.span);
                continue;
            }
            if (p && p->direction == Direction::In)
                error("invalid occurrence: override on in propagation " + key, binding.span);
            check_occurrence_value(occurrence, binding.span, key + " on " + c.path);
        }
        for (const auto& rule : binding.guard_in_rules) {
            const Feature* f = c.find_feature(rule.feature);
            if (!f)
                error("unresolved reference: feature " + rule.feature, rule.span);
            else if (f->direction != Direction::In)
                error("direction mismatch: guard_in feature " + rule.feature +
                          " is not an in port",
                      rule.span);
            if (rule.condition.empty())
                error("invalid guard: condition must name at least one propagation", rule.span);
            if (!rule.mask) {
                const ErrorPropagation* p = type.find_propagation(rule.raise);
                if (!p)
                    error("unresolved reference: in propagation " + rule.raise, rule.span);
                else if (p->direction != Direction::In)
                    error("direction mismatch: guard_in raises propagation " + rule.raise +
                              " which is not declared in",
                          rule.span);
            }
        }
    }

    void check_connections() {
        for (const auto& conn : model_.connections) {
            const ComponentInstance* src = model_.find_component(conn.source.component);
            const ComponentInstance* dst = model_.find_component(conn.target.component);
            if (!src) {
                error("unresolved reference: component " + conn.source.component, conn.span);
                continue;
            }
            if (!dst) {
                error("unresolved reference: component " + conn.target.component, conn.span);
                continue;
            }
            const Feature* src_feature = src->find_feature(conn.source.feature);
            const Feature* dst_feature = dst->find_feature(conn.target.feature);
            if (!src_feature) {
                error("unresolved reference: feature " + conn.source.feature + " of " +
                          src->path,
                      conn.span);
                continue;
            }
            if (!dst_feature) {
                error("unresolved reference: feature " + conn.target.feature + " of " +
                          dst->path,
                      conn.span);
                continue;
            }
            if (src_feature->direction != Direction::Out)
                error("direction mismatch: connection " + conn.display() +
                          " source feature is not an out port",
                      conn.span);
            if (dst_feature->direction != Direction::In)
                error("direction mismatch: connection " + conn.display() +
                          " target feature is not an in port",
                      conn.span);
        }
    }

    void check_bindings() {
        for (const auto& b : model_.bindings) {
            const ComponentInstance* app = model_.find_component(b.application);
            const ComponentInstance* plat = model_.find_component(b.platform);
            if (!app) {
                error("unresolved reference: component " + b.application, b.span);
                continue;
            }
            if (!plat) {
                error("unresolved reference: component " + b.platform, b.span);
                continue;
            }
            if (app->category != Category::Process && app->category != Category::Thread)
                error("category mismatch: binding application " + b.application +
                          " must be a process or thread",
                      b.span);
            if (plat->category != Category::Processor && plat->category != Category::Memory)
                error("category mismatch: binding platform " + b.platform +
                          " must be a processor or memory",
                      b.span);
        }
    }

    void check_bus_accesses() {
        for (const auto& a : model_.bus_accesses) {
            const ComponentInstance* accessor = model_.find_component(a.accessor);
            const ComponentInstance* bus = model_.find_component(a.bus);
            if (!accessor) {
                error("unresolved reference: component " + a.accessor, a.span);
                continue;
            }
            if (!bus) {
                error("unresolved reference: component " + a.bus, a.span);
                continue;
            }
            if (accessor->category != Category::Processor &&
                accessor->category != Category::Memory && accessor->category != Category::Device)
                error("category mismatch: bus accessor " + a.accessor +
                          " must be a processor, memory, or device",
                      a.span);
            if (bus->category != Category::Bus)
                error("category mismatch: bus access target " + a.bus + " must be a bus", a.span);
        }
    }

    const ArchitectureModel& model_;
    std::vector<Diagnostic> diagnostics_;
};

} // namespace

std::vector<Diagnostic> validate_architecture(const ArchitectureModel& model) {
    return Validator(model).run();
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_diagnostic(const Diagnostic& d) {
    const char* severity = d.severity == Severity::Error ? "error" : "warning";
    if (d.span.file.empty()) return std::string(severity) + ": " + d.message;
    return d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
           ": " + severity + ": " + d.message;
}

} // namespace adaptkit
