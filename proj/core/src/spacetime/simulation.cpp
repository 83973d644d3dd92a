#include "posverif/spacetime/simulation.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "posverif/error.hpp"

namespace posverif::spacetime {

const char* event_kind_name(EventKind k) noexcept {
    switch (k) {
        case EventKind::Emit: return "emit";
        case EventKind::Deliver: return "deliver";
        case EventKind::Alarm: return "alarm";
    }
    return "?";
}

std::string Trace::to_jsonl() const {
    std::string out;
    for (const auto& e : events) {
        nlohmann::ordered_json line;
        line["time"] = e.time.str();
        line["kind"] = event_kind_name(e.kind);
        line["party"] = e.party_name;
        line["label"] = e.label;
        line["digest"] = e.digest;
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::vector<const TraceEvent*> Trace::deliveries(PartyId party, const std::string& label) const {
    std::vector<const TraceEvent*> out;
    for (const auto& e : events)
        if (e.kind == EventKind::Deliver && e.party == party && e.label == label) out.push_back(&e);
    return out;
}

const Coordinate& PartyContext::position() const noexcept { return sim_.parties_[id_].position; }

void PartyContext::emit(Emission e) { sim_.emit_now(id_, now_, std::move(e)); }

void PartyContext::set_alarm(const Coordinate& at, std::uint64_t tag) {
    if (at < now_) throw Error(Errc::ConfigInvalid, "alarm scheduled in the past");
    sim_.schedule_alarm(id_, at, tag);
}

PartyId Simulation::add_party(std::string name, Coordinate position, std::shared_ptr<PartyBehavior> behavior) {
    if (started_) throw Error(Errc::SimulationStarted, "cannot add party '" + name + "' after run");
    if (!behavior) throw Error(Errc::ConfigInvalid, "party '" + name + "' has no behavior");
    parties_.push_back({std::move(name), std::move(position), std::move(behavior)});
    return static_cast<PartyId>(parties_.size() - 1);
}

void Simulation::check_party(PartyId id) const {
    if (id >= parties_.size()) throw Error(Errc::ConfigInvalid, "unknown party id " + std::to_string(id));
}

const std::string& Simulation::party_name(PartyId id) const {
    check_party(id);
    return parties_[id].name;
}

const Coordinate& Simulation::party_position(PartyId id) const {
    check_party(id);
    return parties_[id].position;
}

PartyBehavior& Simulation::behavior(PartyId id) const {
    check_party(id);
    return *parties_[id].behavior;
}

void Simulation::push(Event e) {
    queue_.push_back(std::move(e));
    std::push_heap(queue_.begin(), queue_.end(), Later{});
}

void Simulation::schedule_alarm(PartyId party, const Coordinate& at, std::uint64_t tag) {
    check_party(party);
    if (at < Coordinate(0)) throw Error(Errc::ConfigInvalid, "alarm at negative time");
    push({at, seq_++, EventKind::Alarm, party, 0, tag});
}

void Simulation::schedule_emission(PartyId party, const Coordinate& at, Emission e) {
    check_party(party);
    if (at < Coordinate(0)) throw Error(Errc::ConfigInvalid, "emission at negative time");
    messages_.push_back({std::move(e.label), std::move(e.payload), party, at, parties_[party].position,
                         std::move(e.mode), std::move(e.channel)});
    push({at, seq_++, EventKind::Emit, party, messages_.size() - 1, 0});
}

void Simulation::emit_now(PartyId sender, const Coordinate& now, Emission e) {
    schedule_emission(sender, now, std::move(e));
}

namespace {

bool visible_to(const Channel& ch, PartyId p) {
    if (const auto* priv = std::get_if<Private>(&ch)) return priv->members.count(p) != 0;
    return true;
}

}  // namespace

Trace Simulation::run(const Coordinate& until) {
    if (started_) throw Error(Errc::SimulationStarted, "simulation already ran");
    if (until < Coordinate(0)) throw Error(Errc::ConfigInvalid, "run horizon must be >= 0");
    started_ = true;

    while (!queue_.empty() && queue_.front().time <= until) {
        std::pop_heap(queue_.begin(), queue_.end(), Later{});
        const Event ev = queue_.back();
        queue_.pop_back();
        auto& party = parties_[ev.party];

        switch (ev.kind) {
            case EventKind::Emit: {
                const Message& msg = messages_[ev.message];
                trace_.events.push_back({ev.time, EventKind::Emit, ev.party, party.name, msg.label, msg.payload,
                                         digest_hex(msg.payload)});
                std::vector<PartyId> recipients;
                if (const auto* d = std::get_if<Directed>(&msg.mode)) {
                    check_party(d->target);
                    if (!visible_to(msg.channel, d->target))
                        throw Error(Errc::ConfigInvalid, "directed target outside private channel");
                    recipients.push_back(d->target);
                } else {
                    for (PartyId p = 0; p < parties_.size(); ++p)
                        if (visible_to(msg.channel, p)) recipients.push_back(p);
                }
                for (PartyId r : recipients)
                    push({msg.arrival_at(parties_[r].position), seq_++, EventKind::Deliver, r, ev.message, 0});
                break;
            }
            case EventKind::Deliver: {
                // Copy: handlers may emit, which can reallocate messages_.
                const Message msg = messages_[ev.message];
                trace_.events.push_back({ev.time, EventKind::Deliver, ev.party, party.name, msg.label, msg.payload,
                                         digest_hex(msg.payload)});
                PartyContext ctx(*this, ev.party, ev.time);
                party.behavior->on_receive(ctx, msg);
                break;
            }
            case EventKind::Alarm: {
                trace_.events.push_back({ev.time, EventKind::Alarm, ev.party, party.name,
                                         "alarm:" + std::to_string(ev.tag), {}, digest_hex({})});
                PartyContext ctx(*this, ev.party, ev.time);
                party.behavior->on_alarm(ctx, ev.tag);
                break;
            }
        }
    }
    return trace_;
}

bool Deadline::admits(const Coordinate& t) const {
    switch (kind) {
        case Kind::Before: return t < bound;
        case Kind::AtMost: return t <= bound;
        case Kind::Exactly: return t == bound;
        case Kind::AtLeast: return t >= bound;
    }
    return false;
}

bool assert_deadline(const Trace& trace, PartyId party,
                     const std::function<bool(const Bytes&, const Coordinate&)>& predicate) {
    for (const auto& e : trace.events)
        if (e.kind == EventKind::Deliver && e.party == party && predicate(e.payload, e.time)) return true;
    return false;
}

bool assert_deadline(const Trace& trace, PartyId party, const std::string& label, const Deadline& deadline) {
    const auto hits = trace.deliveries(party, label);
    return !hits.empty() && deadline.admits(hits.front()->time);
}

}  // namespace posverif::spacetime
