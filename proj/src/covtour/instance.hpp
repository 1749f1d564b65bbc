#ifndef COVTOUR_INSTANCE_HPP_
#define COVTOUR_INSTANCE_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "covtour/network.hpp"
#include "covtour/types.hpp"

namespace covtour {

struct InstanceParams {
    double gamma_m = 0.0;
    std::optional<int> m;              // primary: tour count (Q derived)
    std::optional<Quantity> capacity;  // primary: vehicle capacity (m derived)
    double buffer = 0.0;               // fraction of capacity kept free when deriving m
    double stop_penalty_s = 5.0;
    double s_col = 1.0;
    double s_dep = 1.0;
};

// How the fleet was specified in the source document.
enum class FleetSpec { MPrimary, CapacityPrimary, Pinned };

struct Fleet {
    int m;
    Quantity capacity;
};

// m = ceil(total / (Q * (1 - buffer))) when the capacity is primary,
// Q = ceil(total / m) (in canonical units) when the tour count is primary.
Fleet derive_fleet(Quantity total_demand, const InstanceParams& params);

class ProblemInstance {
public:
    static ProblemInstance assemble(RoadNetwork base_network, std::map<NodeId, Quantity> demands,
                                    std::optional<std::vector<PreferenceList>> explicit_prefs,
                                    const InstanceParams& params);

    const RoadNetwork& network() const { return *network_; }
    const TravelCostMatrix& travel() const { return travel_; }
    const std::map<NodeId, Quantity>& demands() const { return demands_; }
    Quantity demand(NodeId i) const { return demands_.at(i); }
    const std::map<NodeId, PreferenceList>& prefs() const { return prefs_; }
    const PreferenceList& pref(NodeId i) const { return prefs_.at(i); }
    int m() const { return m_; }
    Quantity capacity() const { return capacity_; }
    double stop_penalty_s() const { return stop_penalty_s_; }
    double gamma_m() const { return gamma_m_; }
    const SpeedModel& speeds() const { return speeds_; }
    double buffer() const { return buffer_; }
    FleetSpec fleet_spec() const { return fleet_spec_; }
    bool prefs_explicit() const { return prefs_explicit_; }

    Quantity total_demand() const;
    // True when every demand is a whole number of canonical units; the exact
    // oracle only accepts such instances.
    bool integer_demands() const;
    // FNV-1a of the canonical serialized form.
    const std::string& digest() const { return digest_; }

private:
    ProblemInstance() = default;

    std::shared_ptr<const RoadNetwork> network_;
    TravelCostMatrix travel_;
    std::map<NodeId, Quantity> demands_;
    std::map<NodeId, PreferenceList> prefs_;
    int m_ = 1;
    Quantity capacity_ = 0;
    double stop_penalty_s_ = 0.0;
    double gamma_m_ = 0.0;
    SpeedModel speeds_{1.0, 1.0};
    double buffer_ = 0.0;
    FleetSpec fleet_spec_ = FleetSpec::MPrimary;
    bool prefs_explicit_ = false;
    std::string digest_;
};

ProblemInstance load_instance(const std::string& text);
std::string save_instance(const ProblemInstance& inst);

// Random sparse planar-style instance: jittered grid nodes, two-way road
// segments, every non-depot node a demand node with probability demand_prob.
ProblemInstance generate_sparse(int n_nodes, double demand_prob, std::uint64_t seed, const InstanceParams& params);

// Canonical quantity parsing: canonical units -> centi-units, rejecting
// values finer than the 0.01-unit grid.
Quantity quantity_from_units(double units, const std::string& what);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace covtour

#endif
