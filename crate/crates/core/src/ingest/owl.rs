//! The OWL RDF/XML subset: typed individual nodes, classes with
//! `rdfs:subClassOf` (named or `owl:Restriction`), `owl:oneOf`,
//! `owl:complementOf`, `owl:disjointWith`, `owl:equivalentClass`, and
//! anonymous classes given by a property value.

use super::xml::{self, fragment, Element};
use super::{check_name, CardinalityKind, DiagnosticKind, Parsed, SourceAxiom, UNSUPPORTED_OWL};
use crate::symbol::Symbol;

pub(super) fn parse(text: &str) -> Parsed {
    let mut out = Parsed::default();
    if text.trim().is_empty() {
        return out;
    }
    let (root, stray) = match xml::parse(text) {
        Ok(parsed) => parsed,
        Err(e) => {
            out.error(DiagnosticKind::Syntax, e.line, format!("malformed XML: {}", e.message));
            return out;
        }
    };
    super::stray_warnings(&mut out, stray);
    let mut last_class = None;
    for el in &root.children {
        if el.local() == "RDF" {
            for child in &el.children {
                top(&mut out, child, &mut last_class);
            }
        } else {
            top(&mut out, el, &mut last_class);
        }
    }
    out
}

const CLASS_AXIOMS: &[&str] = &["subClassOf", "complementOf", "disjointWith", "equivalentClass", "oneOf"];

/// A class axiom written as a sibling after a self-closed `owl:Class`
/// applies to that class.
fn top(out: &mut Parsed, el: &Element, last_class: &mut Option<Symbol>) {
    let local = el.local();
    if CLASS_AXIOMS.contains(&local) {
        match *last_class {
            Some(class) => {
                out.diagnostics.push(super::Diagnostic::warning(
                    el.line,
                    format!("`{local}` outside its class element; applied to `{class}`"),
                ));
                class_child(out, class, el);
            }
            None => out.error(DiagnosticKind::Syntax, el.line, format!("`{local}` outside a class element")),
        }
        return;
    }
    if let Some(class) = node(out, el) {
        *last_class = Some(class);
    }
}

fn unsupported(out: &mut Parsed, el: &Element, what: &str) {
    out.error(
        DiagnosticKind::Unsupported,
        el.line,
        format!("unsupported OWL construct `{what}`"),
    );
}

fn name_of(el: &Element) -> Option<&str> {
    el.attr("ID").or_else(|| el.attr("about")).map(fragment)
}

fn resource(el: &Element) -> Option<&str> {
    el.attr("resource").map(fragment)
}

fn symbol(out: &mut Parsed, line: usize, name: &str) -> Option<Symbol> {
    check_name(out, line, name).then(|| Symbol::new(name))
}

/// Handles one element; returns the class it declares, if any.
fn node(out: &mut Parsed, el: &Element) -> Option<Symbol> {
    let local = el.local();
    match local {
        "Ontology" | "AnnotationProperty" => {}
        "Class" => return class(out, el),
        "ObjectProperty" => object_property(out, el),
        "Description" => description(out, el),
        "Restriction" => unsupported(out, el, "top-level Restriction"),
        _ if UNSUPPORTED_OWL.contains(&local) => unsupported(out, el, local),
        _ => individual(out, el, local),
    }
    None
}

fn class(out: &mut Parsed, el: &Element) -> Option<Symbol> {
    let Some(name) = name_of(el) else {
        anonymous_class(out, el);
        return None;
    };
    let class = symbol(out, el.line, name)?;
    out.axiom(el.line, SourceAxiom::ClassDecl(class));
    for child in &el.children {
        class_child(out, class, child);
    }
    Some(class)
}

fn class_child(out: &mut Parsed, class: Symbol, child: &Element) {
    let line = child.line;
    match child.local() {
        "label" | "comment" | "seeAlso" | "isDefinedBy" => {}
        "subClassOf" => {
            if let Some(sup) = resource(child) {
                if let Some(sup) = symbol(out, line, sup) {
                    out.axiom(line, SourceAxiom::SubClassOf { sub: class, sup });
                }
            } else if let Some(r) = child.child("Restriction") {
                restriction(out, class, r);
            } else if let Some(sup) = child.child("Class").and_then(name_of) {
                if let Some(sup) = symbol(out, line, sup) {
                    out.axiom(line, SourceAxiom::SubClassOf { sub: class, sup });
                }
            } else {
                unsupported(out, child, "anonymous superclass expression");
            }
        }
        "complementOf" => match class_ref(child) {
            Some(other) => {
                if let Some(complement) = symbol(out, line, other) {
                    out.axiom(line, SourceAxiom::ComplementOf { class, complement });
                }
            }
            None => unsupported(out, child, "complementOf expression"),
        },
        "disjointWith" => match class_ref(child) {
            Some(other) => {
                if let Some(other) = symbol(out, line, other) {
                    out.axiom(line, SourceAxiom::DisjointWith { class, other });
                }
            }
            None => unsupported(out, child, "disjointWith expression"),
        },
        "equivalentClass" => match class_ref(child) {
            Some(other) => {
                if let Some(other) = symbol(out, line, other) {
                    out.axiom(line, SourceAxiom::EquivalentClasses { class, other });
                }
            }
            None => unsupported(out, child, "equivalentClass expression"),
        },
        "oneOf" => {
            let mut members = Vec::new();
            for m in &child.children {
                match name_of(m) {
                    Some(n) => {
                        if let Some(s) = symbol(out, m.line, n) {
                            members.push(s);
                        }
                    }
                    None => out.error(
                        DiagnosticKind::Syntax,
                        m.line,
                        "oneOf member without rdf:about or rdf:ID",
                    ),
                }
            }
            out.axiom(line, SourceAxiom::OneOf { class, members });
        }
        other if UNSUPPORTED_OWL.contains(&other) => unsupported(out, child, other),
        other => unsupported(out, child, &format!("Class/{other}")),
    }
}

/// `rdf:resource` or a nested named class.
fn class_ref(el: &Element) -> Option<&str> {
    resource(el).or_else(|| el.child("Class").and_then(name_of))
}

fn anonymous_class(out: &mut Parsed, el: &Element) {
    let mut seen = false;
    for child in &el.children {
        let local = child.local();
        if UNSUPPORTED_OWL.contains(&local) {
            unsupported(out, child, local);
            continue;
        }
        match resource(child) {
            Some(value) => {
                let (Some(property), Some(value)) = (
                    symbol(out, child.line, local),
                    symbol(out, child.line, value),
                ) else {
                    continue;
                };
                out.axiom(child.line, SourceAxiom::AnonymousClass { property, value });
                seen = true;
            }
            None => unsupported(out, child, &format!("anonymous Class/{local}")),
        }
    }
    if !seen && el.children.is_empty() {
        out.error(DiagnosticKind::Syntax, el.line, "owl:Class without a name or a defining property");
    }
}

fn restriction(out: &mut Parsed, class: Symbol, r: &Element) {
    let Some(property) = r.child("onProperty").and_then(class_ref_or_property) else {
        out.error(DiagnosticKind::Syntax, r.line, "owl:Restriction without owl:onProperty");
        return;
    };
    let Some(property) = symbol(out, r.line, property) else { return };
    let mut found = false;
    for c in &r.children {
        let line = c.line;
        let kind = match c.local() {
            "onProperty" | "label" | "comment" => continue,
            "someValuesFrom" | "allValuesFrom" => {
                found = true;
                let Some(filler) = class_ref(c) else {
                    unsupported(out, c, "restriction filler expression");
                    continue;
                };
                let Some(filler) = symbol(out, line, filler) else { continue };
                let axiom = if c.local() == "someValuesFrom" {
                    SourceAxiom::SomeValuesFrom { class, property, filler }
                } else {
                    SourceAxiom::AllValuesFrom { class, property, filler }
                };
                out.axiom(line, axiom);
                continue;
            }
            "cardinality" => CardinalityKind::Exact,
            "minCardinality" => CardinalityKind::Min,
            "maxCardinality" => CardinalityKind::Max,
            other if UNSUPPORTED_OWL.contains(&other) => {
                found = true;
                unsupported(out, c, other);
                continue;
            }
            other => {
                found = true;
                unsupported(out, c, &format!("Restriction/{other}"));
                continue;
            }
        };
        found = true;
        match c.trimmed_text().parse::<usize>() {
            Ok(n) => out.axiom(line, SourceAxiom::Cardinality { kind, class, property, n }),
            Err(_) => out.error(
                DiagnosticKind::Syntax,
                line,
                format!("cardinality `{}` is not a non-negative integer", c.trimmed_text()),
            ),
        }
    }
    if !found {
        out.error(DiagnosticKind::Syntax, r.line, "owl:Restriction without a constraint");
    }
}

fn class_ref_or_property(el: &Element) -> Option<&str> {
    resource(el).or_else(|| el.child("ObjectProperty").and_then(name_of))
}

fn object_property(out: &mut Parsed, el: &Element) {
    let Some(name) = name_of(el) else {
        out.error(DiagnosticKind::Syntax, el.line, "owl:ObjectProperty without a name");
        return;
    };
    if let Some(p) = symbol(out, el.line, name) {
        out.axiom(el.line, SourceAxiom::PropertyDecl(p));
    }
    for child in &el.children {
        match child.local() {
            "label" | "comment" => {}
            "type" => {
                let t = resource(child).unwrap_or("rdf:type");
                unsupported(out, child, t);
            }
            other => unsupported(out, child, other),
        }
    }
}

fn description(out: &mut Parsed, el: &Element) {
    let class = el
        .children_named("type")
        .filter_map(resource)
        .next()
        .unwrap_or("Thing")
        .to_owned();
    typed_node(out, el, &class, true);
}

fn individual(out: &mut Parsed, el: &Element, class: &str) {
    typed_node(out, el, class, false);
}

fn typed_node(out: &mut Parsed, el: &Element, class: &str, skip_type: bool) {
    let Some(name) = name_of(el) else {
        out.error(
            DiagnosticKind::Syntax,
            el.line,
            format!("<{}> node without rdf:ID or rdf:about", el.name),
        );
        return;
    };
    let Some(individual) = symbol(out, el.line, name) else { return };
    let class_name = if class == "Thing" { "thing" } else { class };
    if let Some(class) = symbol(out, el.line, class_name) {
        out.axiom(el.line, SourceAxiom::IndividualAssertion { individual, class });
    }
    for child in &el.children {
        let local = child.local();
        let line = child.line;
        if local == "type" {
            if skip_type {
                continue;
            }
            if let Some(c) = resource(child).and_then(|c| symbol(out, line, c)) {
                out.axiom(line, SourceAxiom::IndividualAssertion { individual, class: c });
            }
            continue;
        }
        if matches!(local, "label" | "comment") {
            continue;
        }
        if UNSUPPORTED_OWL.contains(&local) {
            unsupported(out, child, local);
            continue;
        }
        let Some(property) = symbol(out, line, local) else { continue };
        if let Some(value) = resource(child) {
            if let Some(value) = symbol(out, line, value) {
                out.axiom(line, SourceAxiom::PropertyAssertion { subject: individual, property, value });
            }
        } else if let Some(nested) = child.children.first() {
            if let Some(value) = name_of(nested).and_then(|v| symbol(out, nested.line, v)) {
                out.axiom(line, SourceAxiom::PropertyAssertion { subject: individual, property, value });
            }
            let _ = node(out, nested);
        } else {
            unsupported(out, child, "DatatypeProperty");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Severity;

    fn s(x: &str) -> Symbol {
        Symbol::new(x)
    }

    #[test]
    fn typed_individual_node() {
        let doc = r##"<sniper rdf:ID="smith"> <hasCombatIntent rdf:resource="#friendlyIntent"/> </sniper>"##;
        let p = parse(doc);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        assert_eq!(
            p.axiom_items(),
            vec![
                SourceAxiom::IndividualAssertion { individual: s("smith"), class: s("sniper") },
                SourceAxiom::PropertyAssertion {
                    subject: s("smith"),
                    property: s("hasCombatIntent"),
                    value: s("friendlyIntent")
                },
            ]
        );
    }

    #[test]
    fn some_values_restriction() {
        let doc = r##"<owl:Class rdf:about="#theaterObject">
  <rdfs:subClassOf>
    <owl:Restriction>
      <owl:onProperty rdf:resource="#describedBy" />
      <owl:someValuesFrom rdf:resource="#observationArtifact" />
    </owl:Restriction>
  </rdfs:subClassOf>
</owl:Class>"##;
        let p = parse(doc);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        assert!(p.axiom_items().contains(&SourceAxiom::SomeValuesFrom {
            class: s("theaterObject"),
            property: s("describedBy"),
            filler: s("observationArtifact"),
        }));
        let line = p
            .axioms
            .iter()
            .find(|a| matches!(a.item, SourceAxiom::SomeValuesFrom { .. }))
            .unwrap()
            .line;
        assert_eq!(line, 5);
    }

    #[test]
    fn exact_cardinality_with_entity_datatype() {
        let doc = r##"<owl:Class rdf:ID="theaterObject">
  <rdfs:subClassOf>
    <owl:Restriction>
      <owl:onProperty rdf:resource="#describedBy" />
      <owl:cardinality rdf:datatype="&xsd;nonNegativeInteger"> 1 </owl:cardinality>
    </owl:Restriction>
  </rdfs:subClassOf>
</owl:Class>"##;
        let p = parse(doc);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        assert!(p.axiom_items().contains(&SourceAxiom::Cardinality {
            kind: CardinalityKind::Exact,
            class: s("theaterObject"),
            property: s("describedBy"),
            n: 1,
        }));
    }

    #[test]
    fn sibling_restriction_after_self_closed_class() {
        let doc = r##"<owl:Class rdf:about="#theaterObject" /> <rdfs:subClassOf> <owl:Restriction> <owl:onProperty rdf:resource="#describedBy" /> <owl:someValuesFrom rdf:resource="#observationArtifact" /> </owl:Restriction> </rdfs:subClassOf> </owl:Class>"##;
        let p = parse(doc);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        assert_eq!(p.diagnostics.len(), 2, "one stray end tag, one reattached axiom");
        assert_eq!(
            p.axiom_items(),
            vec![
                SourceAxiom::ClassDecl(s("theaterObject")),
                SourceAxiom::SomeValuesFrom {
                    class: s("theaterObject"),
                    property: s("describedBy"),
                    filler: s("observationArtifact"),
                },
            ]
        );
    }

    #[test]
    fn anonymous_class() {
        let p = parse(r##"<owl:Class> <hasCombatIntent rdf:resource="#friendlyIntent"/> </owl:Class>"##);
        assert_eq!(
            p.axiom_items(),
            vec![SourceAxiom::AnonymousClass { property: s("hasCombatIntent"), value: s("friendlyIntent") }]
        );
    }

    #[test]
    fn class_axioms_and_enumeration() {
        let doc = r##"<rdf:RDF>
<owl:Class rdf:ID="combatIntent">
  <owl:oneOf rdf:parseType="Collection">
    <owl:Thing rdf:about="#friendlyIntent"/>
    <owl:Thing rdf:about="#hostileIntent"/>
    <owl:Thing rdf:about="#unknownIntent"/>
  </owl:oneOf>
</owl:Class>
<owl:Class rdf:ID="friend"><owl:complementOf rdf:resource="#foe"/></owl:Class>
<owl:Class rdf:ID="tank"><owl:disjointWith rdf:resource="#truck"/><rdfs:subClassOf rdf:resource="#vehicle"/></owl:Class>
<owl:Class rdf:ID="roi"><owl:equivalentClass rdf:resource="#regionOfInterest"/></owl:Class>
</rdf:RDF>"##;
        let p = parse(doc);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        let items = p.axiom_items();
        assert!(items.contains(&SourceAxiom::OneOf {
            class: s("combatIntent"),
            members: vec![s("friendlyIntent"), s("hostileIntent"), s("unknownIntent")],
        }));
        assert!(items.contains(&SourceAxiom::ComplementOf { class: s("friend"), complement: s("foe") }));
        assert!(items.contains(&SourceAxiom::DisjointWith { class: s("tank"), other: s("truck") }));
        assert!(items.contains(&SourceAxiom::SubClassOf { sub: s("tank"), sup: s("vehicle") }));
        assert!(items.contains(&SourceAxiom::EquivalentClasses { class: s("roi"), other: s("regionOfInterest") }));
    }

    #[test]
    fn unsupported_constructs_are_named_and_collected() {
        let doc = r##"<rdf:RDF>
<owl:ObjectProperty rdf:ID="partOf"><rdfs:subPropertyOf rdf:resource="#related"/></owl:ObjectProperty>
<owl:TransitiveProperty rdf:ID="ancestor"/>
<person rdf:ID="al"><owl:sameAs rdf:resource="#albert"/></person>
</rdf:RDF>"##;
        let p = parse(doc);
        let msgs: Vec<_> = p.diagnostics.iter().map(|d| d.message.clone()).collect();
        assert_eq!(p.diagnostics.len(), 3, "{msgs:?}");
        assert!(msgs[0].contains("subPropertyOf"));
        assert!(msgs[1].contains("TransitiveProperty"));
        assert!(msgs[2].contains("sameAs"));
        assert!(p.diagnostics.iter().all(|d| d.kind == DiagnosticKind::Unsupported));
        assert_eq!(p.diagnostics[0].line, 2);
        // the plain individual assertion still comes through
        assert!(p.axiom_items().contains(&SourceAxiom::IndividualAssertion { individual: s("al"), class: s("person") }));
    }

    #[test]
    fn malformed_xml_reports_line() {
        let p = parse("<rdf:RDF>\n<owl:Class rdf:ID=\"a\">\n</rdf:RDF>");
        assert!(p.has_errors());
        assert_eq!(p.diagnostics[0].severity, Severity::Error);
        assert_eq!(p.diagnostics[0].kind, DiagnosticKind::Syntax);
    }

    #[test]
    fn reserved_names_rejected() {
        let p = parse(r##"<unnamedIndividual rdf:ID="x"/>"##);
        assert!(p.diagnostics.iter().any(|d| d.kind == DiagnosticKind::Reserved));
    }
}
