#ifndef ADAPTKIT_DEPENDENCY_HPP
#define ADAPTKIT_DEPENDENCY_HPP

#include <string>
#include <vector>

#include "adaptkit/model.hpp"

namespace adaptkit {

enum class Channel { Binding, Connection, BusAccess };

std::string_view channel_name(Channel c);

/// One resolved propagation path: sender's out-propagation arrives at the
/// receiver either as a named in-propagation or masked by a guard.
struct DependencyLink {
    std::string sender;   // component path
    std::string out_prop; // propagation name, declared out in sender
    std::string receiver; // component path, receiver != sender
    bool masked = false;
    std::string in_prop; // declared in in receiver; empty when masked
    Channel channel = Channel::Binding;
    std::string source_feature; // connection channel only
    std::string target_feature; // connection channel only

    std::string display() const;
};

bool operator==(const DependencyLink& a, const DependencyLink& b);

/// Enumerates every dependency link of a validated model. Receivers are
/// found through bindings (both directions), connections (out feature to in
/// feature) and bus accesses (both directions). A Guard_In rule on the
/// arrival feature takes precedence over name matching; name matching
/// requires the receiver to declare an in-propagation with the sender's
/// propagation name. The result is sorted by (sender, out_prop, receiver)
/// and holds at most one link per such triple.
std::vector<DependencyLink> find_dependencies(const ArchitectureModel& model);

/// Out-propagations that produce no link at all; sorted, duplicate-free.
std::vector<std::pair<std::string, std::string>> unmatched_out_propagations(
    const ArchitectureModel& model);

} // namespace adaptkit

#endif
