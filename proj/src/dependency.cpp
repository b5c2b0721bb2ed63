#include "adaptkit/dependency.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace adaptkit {

std::string_view channel_name(Channel c) {
    switch (c) {
        case Channel::Binding: return "binding";
        case Channel::Connection: return "connection";
        case Channel::BusAccess: return "bus_access";
    }
    return "?";
}

std::string DependencyLink::display() const {
    std::string s = sender + "/" + out_prop + " -> " + receiver;
    s += masked ? " (masked" : "/" + in_prop + " (";
    s += std::string(channel_name(channel));
    if (channel == Channel::Connection) s += " " + source_feature + " -> " + target_feature;
    s += ")";
    return s;
}

bool operator==(const DependencyLink& a, const DependencyLink& b) {
    return a.sender == b.sender && a.out_prop == b.out_prop && a.receiver == b.receiver &&
           a.masked == b.masked && a.in_prop == b.in_prop && a.channel == b.channel &&
           a.source_feature == b.source_feature && a.target_feature == b.target_feature;
}

namespace {

const ErrorModelType* automaton_of(const ArchitectureModel& model, const ComponentInstance* c) {
    if (!c || !c->error_model) return nullptr;
    auto it = model.error_types.find(c->error_model->type_name);
    return it == model.error_types.end() ? nullptr : &it->second;
}

class Resolver {
public:
    explicit Resolver(const ArchitectureModel& model) : model_(model) {}

    std::vector<DependencyLink> run() {
        // Channel priority when one sender/propagation/receiver triple is
        // reachable more than one way: binding, then connection, then bus
        // access, then declaration order within the channel.
        for (const auto& b : model_.bindings) {
            offer_all(b.platform, b.application, Channel::Binding, nullptr);
            offer_all(b.application, b.platform, Channel::Binding, nullptr);
        }
        for (const auto& conn : model_.connections)
            offer_all(conn.source.component, conn.target.component, Channel::Connection, &conn);
        for (const auto& a : model_.bus_accesses) {
            offer_all(a.bus, a.accessor, Channel::BusAccess, nullptr);
            offer_all(a.accessor, a.bus, Channel::BusAccess, nullptr);
        }
        std::vector<DependencyLink> links;
        links.reserve(chosen_.size());
        for (auto& [key, link] : chosen_) links.push_back(std::move(link));
        return links;
    }

private:
    void offer_all(const std::string& sender_path, const std::string& receiver_path,
                   Channel channel, const Connection* conn) {
        if (sender_path == receiver_path) return;
        const ComponentInstance* sender = model_.find_component(sender_path);
        const ComponentInstance* receiver = model_.find_component(receiver_path);
        const ErrorModelType* sender_type = automaton_of(model_, sender);
        const ErrorModelType* receiver_type = automaton_of(model_, receiver);
        if (!sender_type || !receiver_type) return;
        for (const auto& prop : sender_type->propagations) {
            if (prop.direction != Direction::Out) continue;
            DependencyLink link;
            link.sender = sender_path;
            link.out_prop = prop.name;
            link.receiver = receiver_path;
            link.channel = channel;
            if (conn) {
                link.source_feature = conn->source.feature;
                link.target_feature = conn->target.feature;
            }
            if (!resolve_effect(link, *receiver, *receiver_type)) continue;
            auto key = std::make_tuple(link.sender, link.out_prop, link.receiver);
            chosen_.emplace(std::move(key), std::move(link));
        }
    }

    // Fills in masked/in_prop. Returns false when the propagation has no
    // effect on this receiver and no link must be produced.
    bool resolve_effect(DependencyLink& link, const ComponentInstance& receiver,
                        const ErrorModelType& receiver_type) const {
        if (link.channel == Channel::Connection) {
            for (const auto& rule : receiver.error_model->guard_in_rules) {
                if (rule.feature != link.target_feature) continue;
                if (std::find(rule.condition.begin(), rule.condition.end(), link.out_prop) ==
                    rule.condition.end())
                    continue;
                link.masked = rule.mask;
                link.in_prop = rule.mask ? "" : rule.raise;
                return true;
            }
        }
        const ErrorPropagation* named = receiver_type.find_propagation(link.out_prop);
        if (named && named->direction == Direction::In) {
            link.in_prop = link.out_prop;
            return true;
        }
        return false;
    }

    const ArchitectureModel& model_;
    std::map<std::tuple<std::string, std::string, std::string>, DependencyLink> chosen_;
};

} // namespace

std::vector<DependencyLink> find_dependencies(const ArchitectureModel& model) {
    return Resolver(model).run();
}

std::vector<std::pair<std::string, std::string>> unmatched_out_propagations(
    const ArchitectureModel& model) {
    std::set<std::pair<std::string, std::string>> matched;
    for (const auto& link : find_dependencies(model)) matched.insert({link.sender, link.out_prop});
    std::vector<std::pair<std::string, std::string>> unmatched;
    model.for_each_component([&](const ComponentInstance& c) {
        const ErrorModelType* type = automaton_of(model, &c);
        if (!type) return;
        for (const auto& prop : type->propagations) {
            if (prop.direction != Direction::Out) continue;
            if (!matched.count({c.path, prop.name})) unmatched.push_back({c.path, prop.name});
        }
    });
    std::sort(unmatched.begin(), unmatched.end());
    unmatched.erase(std::unique(unmatched.begin(), unmatched.end()), unmatched.end());
    return unmatched;
}

} // namespace adaptkit
