//! A small element tree over quick-xml events, with line numbers.
//!
//! Namespace prefixes are kept in `name` and stripped by `local()`; prefixes
//! are never resolved, so documents with undeclared prefixes still load.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

#[derive(Debug, Clone)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Element>,
    pub text: String,
    pub line: usize,
}

impl Element {
    pub fn local(&self) -> &str {
        local_name(&self.name)
    }

    /// Attribute by local name, ignoring any prefix.
    pub fn attr(&self, local: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| local_name(k) == local)
            .map(|(_, v)| v.as_str())
    }

    pub fn child(&self, local: &str) -> Option<&Element> {
        self.children.iter().find(|c| c.local() == local)
    }

    pub fn children_named<'a>(&'a self, local: &'a str) -> impl Iterator<Item = &'a Element> + 'a {
        self.children.iter().filter(move |c| c.local() == local)
    }

    pub fn trimmed_text(&self) -> &str {
        self.text.trim()
    }
}

pub fn local_name(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

/// Strips everything up to the last `#`, turning IRIs into bare names.
pub fn fragment(iri: &str) -> &str {
    iri.rsplit('#').next().unwrap_or(iri).trim()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlError {
    pub line: usize,
    pub message: String,
}

fn line_at(text: &str, offset: usize) -> usize {
    let end = offset.min(text.len());
    text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

fn element_from(start: &BytesStart<'_>, line: usize) -> Result<Element, String> {
    let name = start.name().as_ref().to_owned();
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = attr.key.as_ref().to_owned();
        // entity references such as &xsd; are left verbatim
        let value = attr
            .normalized_value(quick_xml::XmlVersion::Implicit1_0)
            .map(|v| v.into_owned())
            .unwrap_or_else(|_| attr.value.clone().into_owned());
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
        text: String::new(),
        line,
    })
}

/// Parses a document into its top-level elements. A synthetic root named
/// `#document` holds them. End tags closing nothing at the top level are
/// skipped and reported in the second component.
pub fn parse(text: &str) -> Result<(Element, Vec<XmlError>), XmlError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = false;
    reader.config_mut().allow_unmatched_ends = true;
    let mut stray = Vec::new();
    let mut stack = vec![Element {
        name: "#document".into(),
        attrs: Vec::new(),
        children: Vec::new(),
        text: String::new(),
        line: 1,
    }];
    loop {
        let before = reader.buffer_position() as usize;
        let event = reader.read_event().map_err(|e| XmlError {
            line: line_at(text, reader.error_position() as usize),
            message: e.to_string(),
        })?;
        // line of the tag itself, skipping whitespace consumed before it
        let tag_offset = before + text[before.min(text.len())..].len()
            - text[before.min(text.len())..].trim_start().len();
        let line = line_at(text, tag_offset);
        let err = |message: String| XmlError { line, message };
        match event {
            Event::Start(start) => {
                stack.push(element_from(&start, line).map_err(err)?);
            }
            Event::Empty(start) => {
                let el = element_from(&start, line).map_err(err)?;
                stack.last_mut().expect("root").children.push(el);
            }
            Event::End(end) => {
                let name = end.name().as_ref().to_owned();
                if stack.len() == 1 {
                    stray.push(err(format!("end tag </{name}> closes nothing; ignored")));
                    continue;
                }
                let done = stack.pop().expect("open element");
                if done.name != name {
                    return Err(err(format!("end tag </{name}> does not match <{}>", done.name)));
                }
                stack.last_mut().expect("root").children.push(done);
            }
            Event::Text(t) => {
                stack.last_mut().expect("root").text.push_str(&t.xml10_content());
            }
            Event::CData(t) => {
                stack.last_mut().expect("root").text.push_str(&t.xml10_content());
            }
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref() {
                    Ok(Some(c)) => c.to_string(),
                    _ => match r.xml10_content().as_ref() {
                        "amp" => "&".into(),
                        "lt" => "<".into(),
                        "gt" => ">".into(),
                        "quot" => "\"".into(),
                        "apos" => "'".into(),
                        other => format!("&{other};"),
                    },
                };
                stack.last_mut().expect("root").text.push_str(&resolved);
            }
            Event::Eof => break,
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if stack.len() != 1 {
        let open = stack.last().expect("non-empty");
        return Err(XmlError {
            line: open.line,
            message: format!("element <{}> is never closed", open.name),
        });
    }
    Ok((stack.pop().expect("root"), stray))
}
