#pragma once

#include "protocheck/registry.hpp"
#include "protocheck/semantics.hpp"

namespace protocheck {
namespace fixtures {

// Flight-booking intent: three required slots (origin/destination with an
// airport enum, a free date), one optional cabin-class slot, transactional.
TermPtr book_flight_intent();
std::vector<std::string> airports();
Bindings book_flight_ok_params();
Bindings book_flight_deficient_params();  // missing the date
ExploreConfig book_flight_config();

// Single-slot variant used for the enum-image check.
TermPtr enum_flight_intent();

// Issue-creation tool: owner/repo/title required, body optional.
TermPtr create_issue_tool();
ExploreConfig create_issue_config();
Bindings create_issue_ok_params();

// Account-deletion tool; `approves` controls the requires_approval flag,
// `extended` whether metadata is attached at all.
TermPtr delete_user_tool(bool extended, bool approves);
McpRegistry delete_user_registry(bool extended, bool approves);

// Lookup tool with three documented failure modes; the fallback target
// resolves against use_cached_data_tool().
TermPtr fetch_user_data_tool();
TermPtr use_cached_data_tool();

// Search tool whose summary/description reproduce the published
// two-level-description example.
TermPtr search_repositories_tool();

// Payment chain: process_payment requires create_order and verify_balance.
McpRegistry payment_registry();

// Two-tool dependency pair: the dependent tool requires the producer.
McpRegistry dependent_pair_registry(bool with_guard);
ExploreConfig dependent_pair_config(const McpRegistry& reg);

// Confined-credential pattern and its direct-leak counterpart.
TermPtr confined_tool_term();
TermPtr leaky_term();

// Tool whose description embeds an instruction-injection payload.
TermPtr innocent_search_tool();
McpRegistry innocent_search_registry();

// Same name and schema, descriptions differing by a side-effect suffix.
std::pair<TermPtr, TermPtr> transfer_funds_pair();

// Reverse-mapping gap witnesses.
TermPtr log_resource();
TermPtr negotiation_term();  // initialize composed with an empty listing

// Order-creation intent (transactional, no annotations).
TermPtr create_order_intent();

// Description whose density is exactly 3/10.
const char* iata_description();

}  // namespace fixtures
}  // namespace protocheck
