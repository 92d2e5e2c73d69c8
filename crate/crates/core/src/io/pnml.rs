//! PNML subset: places, transitions, unit arcs, names, initial and final markings.
//!
//! A transition is silent when its `<toolspecific>` carries
//! `activity="$invisible$"` (as written by ProM and PM4Py) or when it has no
//! or an empty `<name>`. Final markings are read from per-place
//! `<finalMarking>` elements or from a `<finalmarkings>` block; the writer
//! emits the latter.

use std::fmt::Write as _;

use quick_xml::escape::escape;
use roxmltree::{Document, Node};

use crate::error::{Error, Result};
use crate::petri::{ActivityId, Label, Marking, PetriNet};

const INVISIBLE: &str = "$invisible$";
const PTNET: &str = "http://www.pnml.org/version-2009/grammar/ptnet";

fn location(doc: &Document, node: Node) -> String {
    let pos = doc.text_pos_at(node.range().start);
    match node.attribute("id") {
        Some(id) => format!("line {}, column {}, <{} id=\"{id}\">", pos.row, pos.col, node.tag_name().name()),
        None => format!("line {}, column {}, <{}>", pos.row, pos.col, node.tag_name().name()),
    }
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|c| c.is_element() && c.tag_name().name() == name)
}

/// Text of `<name><text>..</text></name>`-style wrappers.
fn text_of(node: Node, wrapper: &str) -> Option<String> {
    let w = child(node, wrapper)?;
    let t = child(w, "text")?;
    Some(t.text().unwrap_or("").trim().to_string())
}

fn required_attr<'a>(doc: &Document, node: Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name)
        .ok_or_else(|| Error::parse(location(doc, node), format!("missing `{name}` attribute")))
}

fn token_count(doc: &Document, node: Node, raw: &str) -> Result<u32> {
    raw.parse::<u32>().map_err(|_| Error::parse(location(doc, node), format!("invalid token count `{raw}`")))
}

pub fn read_pnml(bytes: &[u8]) -> Result<PetriNet> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::parse(format!("byte {}", e.valid_up_to()), "input is not UTF-8"))?;
    let doc = Document::parse(text)
        .map_err(|e| Error::parse(format!("line {}, column {}", e.pos().row, e.pos().col), e.to_string()))?;
    let net_node = doc
        .descendants()
        .find(|n| n.is_element() && n.tag_name().name() == "net")
        .ok_or_else(|| Error::parse("document", "no <net> element"))?;

    let name = text_of(net_node, "name")
        .filter(|n| !n.is_empty())
        .or_else(|| net_node.attribute("id").map(str::to_string))
        .unwrap_or_else(|| "net".to_string());
    let mut net = PetriNet::new(name);
    let mut block_final: Option<Marking> = None;

    for node in net_node.descendants().filter(Node::is_element) {
        match node.tag_name().name() {
            "place" if node.attribute("idref").is_some() => {}
            "place" => {
                let id = required_attr(&doc, node, "id")?;
                net.add_place(id);
                if let Some(raw) = text_of(node, "initialMarking") {
                    net.initial_marking.add(id, token_count(&doc, node, &raw)?);
                }
                if let Some(raw) = text_of(node, "finalMarking") {
                    net.final_marking.add(id, token_count(&doc, node, &raw)?);
                }
            }
            "transition" => {
                let id = required_attr(&doc, node, "id")?;
                let invisible = node.children().any(|c| {
                    c.is_element()
                        && c.tag_name().name() == "toolspecific"
                        && c.attribute("activity") == Some(INVISIBLE)
                });
                let label = match text_of(node, "name") {
                    Some(n) if !invisible && !n.is_empty() => Label::Activity(ActivityId::new(n)?),
                    _ => Label::Silent,
                };
                net.add_transition(id, label);
            }
            "arc" => {
                let source = required_attr(&doc, node, "source")?;
                let target = required_attr(&doc, node, "target")?;
                if let Some(raw) = text_of(node, "inscription") {
                    if raw != "1" {
                        return Err(Error::unsupported(
                            location(&doc, node),
                            format!("arc weight `{raw}`; only unit arcs are supported"),
                        ));
                    }
                }
                let kind = node
                    .attribute("type")
                    .map(str::to_string)
                    .or_else(|| child(node, "type").and_then(|t| t.attribute("value").map(str::to_string)))
                    .or_else(|| text_of(node, "arctype"));
                if let Some(kind) = kind {
                    if kind != "normal" {
                        return Err(Error::unsupported(location(&doc, node), format!("`{kind}` arc")));
                    }
                }
                net.add_arc(source, target);
            }
            "referencePlace" | "referenceTransition" => {
                return Err(Error::unsupported(location(&doc, node), "reference nodes"));
            }
            "finalmarkings" => {
                let markings: Vec<Node> =
                    node.children().filter(|c| c.is_element() && c.tag_name().name() == "marking").collect();
                if markings.len() > 1 {
                    return Err(Error::unsupported(location(&doc, node), "more than one final marking"));
                }
                let mut m = Marking::new();
                for place in markings
                    .iter()
                    .flat_map(|mk| mk.children())
                    .filter(|c| c.is_element() && c.tag_name().name() == "place")
                {
                    let id = required_attr(&doc, place, "idref")?;
                    let raw = child(place, "text").and_then(|t| t.text()).unwrap_or("").trim().to_string();
                    m.add(id, token_count(&doc, place, &raw)?);
                }
                block_final = Some(m);
            }
            _ => {}
        }
    }
    if let Some(m) = block_final {
        if !net.final_marking.is_empty() && net.final_marking != m {
            return Err(Error::parse("finalmarkings", "conflicting final markings"));
        }
        net.final_marking = m;
    }
    Ok(net)
}

pub fn write_pnml(net: &PetriNet) -> String {
    let mut out = String::new();
    let name = escape(net.name.as_str());
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml>\n");
    let _ = writeln!(out, "  <net id=\"{name}\" type=\"{PTNET}\">");
    let _ = writeln!(out, "    <name><text>{name}</text></name>");
    out.push_str("    <page id=\"page1\">\n");
    for p in &net.places {
        let id = escape(p.as_str());
        let _ = write!(out, "      <place id=\"{id}\"><name><text>{id}</text></name>");
        let tokens = net.initial_marking.get(p);
        if tokens > 0 {
            let _ = write!(out, "<initialMarking><text>{tokens}</text></initialMarking>");
        }
        out.push_str("</place>\n");
    }
    for t in &net.transitions {
        let id = escape(t.as_str());
        match net.labels.get(t) {
            Some(Label::Activity(a)) => {
                let _ = writeln!(
                    out,
                    "      <transition id=\"{id}\"><name><text>{}</text></name></transition>",
                    escape(a.as_str())
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "      <transition id=\"{id}\"><name><text>{id}</text></name>\
                     <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"{INVISIBLE}\" localNodeID=\"{id}\"/></transition>"
                );
            }
        }
    }
    for (i, arc) in net.arcs.iter().enumerate() {
        let _ = writeln!(
            out,
            "      <arc id=\"arc{i}\" source=\"{}\" target=\"{}\"/>",
            escape(arc.source.as_str()),
            escape(arc.target.as_str())
        );
    }
    out.push_str("    </page>\n");
    if !net.final_marking.is_empty() {
        out.push_str("    <finalmarkings>\n      <marking>\n");
        for (p, n) in net.final_marking.iter() {
            let _ = writeln!(out, "        <place idref=\"{}\"><text>{n}</text></place>", escape(p));
        }
        out.push_str("      </marking>\n    </finalmarkings>\n");
    }
    out.push_str("  </net>\n</pnml>\n");
    out
}
