//! The line-oriented selection dialog.
//!
//! Output widths are fixed so that transcripts line up column for column
//! with the classic terminal session:
//!
//! ```text
//! Found   142 papers in   18 groups
//! group, papers, citations =   1    99    4364
//!
//! Group    1 has    99 papers and   4364 citations in period 1981-2006
//! Distance to selected groups is ******   A sample paper is
//! ```

use std::io::{self, BufRead, Write};

use crate::analysis::Analysis;
use crate::cluster::Cluster;
use crate::ingest::RecordDisplay;
use crate::session::{Decision, PresentationMode, SelectionSession, Verdict};

pub const PROMPT: &str = " Select this group? (y|n|u|all|none|p|c|d|(number)|help):";
/// Shown in place of a distance when none is defined (nothing selected) or
/// when it does not fit its six columns.
pub const NO_DISTANCE: &str = "******";

// Column widths of the fixed-format lines.
const FOUND_PAPERS: usize = 6;
const FOUND_GROUPS: usize = 5;
const ROW_ID: usize = 4;
const ROW_PAPERS: usize = 6;
const ROW_CITATIONS: usize = 8;
const GROUP_ID: usize = 5;
const GROUP_PAPERS: usize = 6;
const GROUP_CITATIONS: usize = 7;
const DISTANCE: usize = 6;
const ADDRESS_WIDTH: usize = 70;
const ADDRESS_INDENT: &str = "   ";

const HELP: &str = " y     accept this group as papers of the author
 n     reject this group
 u     undo the most recent accept or reject
 all   accept every group not yet decided
 none  reject every group not yet decided
 p     list all papers of this group
 c     change the order in which groups are presented
 d     show distances from this group to the others
 r     reject every group farther than the cutoff from the selected ones
 N     jump to group number N
 help  show this list
";

/// One line of the group table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub id: usize,
    pub papers: usize,
    pub citations: u64,
}

impl From<&Cluster> for TableRow {
    fn from(c: &Cluster) -> Self {
        TableRow {
            id: c.id,
            papers: c.paper_count,
            citations: c.total_citations,
        }
    }
}

pub fn header_block(papers: usize, rows: &[TableRow]) -> String {
    let mut out = format!(
        "Found{papers:FOUND_PAPERS$} papers in{:FOUND_GROUPS$} groups\n",
        rows.len()
    );
    for row in rows {
        out.push_str(&format!(
            "group, papers, citations ={:ROW_ID$}{:ROW_PAPERS$}{:ROW_CITATIONS$}\n",
            row.id, row.papers, row.citations
        ));
    }
    out
}

pub fn format_distance(distance: Option<f64>) -> String {
    match distance {
        Some(d) if d.is_finite() => {
            let text = format!("{d:DISTANCE$.2}");
            if text.len() > DISTANCE {
                NO_DISTANCE.to_string()
            } else {
                text
            }
        }
        _ => NO_DISTANCE.to_string(),
    }
}

/// Address words packed into lines of at most `ADDRESS_WIDTH` columns; every
/// line but the last keeps the space that followed its final word.
pub fn address_lines(words: &[String]) -> Vec<String> {
    let mut lines = Vec::new();
    let mut line = String::from(" Address words: ");
    let mut has_word = false;
    for word in words {
        if has_word && line.chars().count() + word.chars().count() > ADDRESS_WIDTH {
            lines.push(std::mem::replace(&mut line, ADDRESS_INDENT.to_string()));
        }
        line.push_str(word);
        line.push(' ');
        has_word = true;
    }
    lines.push(line.trim_end().to_string());
    lines
}

pub fn group_block(cluster: &Cluster, distance: Option<f64>, sample: &RecordDisplay) -> String {
    let mut out = format!(
        "Group{:GROUP_ID$} has{:GROUP_PAPERS$} papers and{:GROUP_CITATIONS$} citations in period {}\n",
        cluster.id,
        cluster.paper_count,
        cluster.total_citations,
        cluster.period()
    );
    out.push_str(&format!(
        "Distance to selected groups is {}   A sample paper is\n",
        format_distance(distance)
    ));
    out.push_str(&format!(" Title: {}\n", sample.title));
    let authors: String = sample.authors.iter().map(|a| format!("{a}; ")).collect();
    out.push_str(&format!(" Authors:  {}\n", authors.trim_end()));
    out.push_str(&format!(" Source:  {}\n", sample.source));
    for line in address_lines(&sample.address_words) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Command {
    Accept,
    Reject,
    Undo,
    AcceptAll,
    RejectAll,
    Papers,
    Cycle,
    Distances,
    AutoReject,
    Jump(usize),
    Help,
    Blank,
    Unknown,
}

fn parse_command(answer: &str) -> Command {
    let answer = answer.trim().to_ascii_lowercase();
    match answer.as_str() {
        "" => Command::Blank,
        "y" | "yes" => Command::Accept,
        "n" | "no" => Command::Reject,
        "u" => Command::Undo,
        "all" => Command::AcceptAll,
        "none" => Command::RejectAll,
        "p" => Command::Papers,
        "c" => Command::Cycle,
        "d" => Command::Distances,
        "r" => Command::AutoReject,
        "h" | "help" | "?" => Command::Help,
        other => other.parse().map_or(Command::Unknown, Command::Jump),
    }
}

/// How the dialog ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Every group has a decision.
    Completed,
    /// Input ran out first; the session holds whatever was decided.
    EndOfInput,
}

pub struct Dialog<'a, R, W> {
    analysis: &'a Analysis,
    session: &'a mut SelectionSession,
    input: R,
    out: W,
    /// Repeat each answer after the prompt, for input that is not a terminal.
    pub echo: bool,
}

impl<'a, R: BufRead, W: Write> Dialog<'a, R, W> {
    pub fn new(
        analysis: &'a Analysis,
        session: &'a mut SelectionSession,
        input: R,
        out: W,
    ) -> Self {
        Dialog {
            analysis,
            session,
            input,
            out,
            echo: false,
        }
    }

    /// Run to completion. `on_change` sees the session after every
    /// mutation, which is where callers persist it.
    pub fn run(
        mut self,
        mut on_change: impl FnMut(&SelectionSession) -> io::Result<()>,
    ) -> io::Result<Outcome> {
        let clusters = &self.analysis.clusters;
        let rows: Vec<TableRow> = clusters.clusters().iter().map(TableRow::from).collect();
        write!(
            self.out,
            "{}",
            header_block(self.analysis.corpus.len(), &rows)
        )?;

        let mut focus: Option<usize> = None;
        loop {
            let Some(id) = focus.or_else(|| self.session.next_cluster(clusters)) else {
                self.finish()?;
                return Ok(Outcome::Completed);
            };
            focus = None;
            let cluster = clusters
                .get(id)
                .expect("session ids come from the cluster set");
            let sample = &self.analysis.corpus.records[cluster.representative_id].display;
            let distance = self.session.distance_to_selected(id, clusters);
            write!(self.out, "\n{}", group_block(cluster, distance, sample))?;

            loop {
                let Some(answer) = self.ask()? else {
                    return Ok(Outcome::EndOfInput);
                };
                match parse_command(&answer) {
                    Command::Blank => continue,
                    Command::Accept | Command::Reject => {
                        let verdict = if parse_command(&answer) == Command::Accept {
                            Verdict::Accept
                        } else {
                            Verdict::Reject
                        };
                        self.session.decide(id, verdict).map_err(io::Error::other)?;
                        on_change(self.session)?;
                        break;
                    }
                    Command::Undo => match self.session.last_decided() {
                        Some(last) => {
                            self.session.undo(last).map_err(io::Error::other)?;
                            on_change(self.session)?;
                            writeln!(self.out, " Group {last} is undecided again")?;
                            focus = Some(last);
                            break;
                        }
                        None => writeln!(self.out, " Nothing to undo")?,
                    },
                    Command::AcceptAll => {
                        let n = self.session.accept_all_remaining();
                        on_change(self.session)?;
                        writeln!(self.out, " Accepted {n} remaining groups")?;
                        break;
                    }
                    Command::RejectAll => {
                        let n = self.session.reject_all_remaining();
                        on_change(self.session)?;
                        writeln!(self.out, " Rejected {n} remaining groups")?;
                        break;
                    }
                    Command::Papers => self.list_papers(cluster)?,
                    Command::Cycle => {
                        let mode = self.session.presentation_mode.cycle();
                        self.session.set_mode(mode);
                        on_change(self.session)?;
                        writeln!(self.out, " Groups are now presented {}", mode.describe())?;
                        if mode == PresentationMode::ByDistanceToSelected
                            && self.session.accepted().is_empty()
                        {
                            writeln!(self.out, " (no group selected yet, so all are equally far)")?;
                        }
                        break;
                    }
                    Command::Distances => self.list_distances(id)?,
                    Command::AutoReject => match self.session.auto_reject_beyond_cutoff(clusters) {
                        Ok(n) => {
                            on_change(self.session)?;
                            writeln!(
                                self.out,
                                " Rejected {n} groups farther than {} from the selected ones",
                                self.session.cutoff
                            )?;
                            break;
                        }
                        Err(e) => writeln!(self.out, " {e}")?,
                    },
                    Command::Jump(n) => {
                        if clusters.get(n).is_some() {
                            focus = Some(n);
                            break;
                        }
                        writeln!(self.out, " There is no group {n}")?;
                    }
                    Command::Help => write!(self.out, "{HELP}")?,
                    Command::Unknown => writeln!(
                        self.out,
                        " Unrecognized answer `{}`; type help for the options",
                        answer.trim()
                    )?,
                }
            }
        }
    }

    fn ask(&mut self) -> io::Result<Option<String>> {
        write!(self.out, "{PROMPT}")?;
        self.out.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            writeln!(self.out)?;
            return Ok(None);
        }
        let answer = line.trim_end_matches(['\n', '\r']).to_string();
        if self.echo {
            writeln!(self.out, "{answer}")?;
        }
        Ok(Some(answer))
    }

    fn list_papers(&mut self, cluster: &Cluster) -> io::Result<()> {
        for &rid in &cluster.member_ids {
            let record = &self.analysis.corpus.records[rid];
            let year = record
                .year_value()
                .map_or_else(|| "----".to_string(), |y| y.to_string());
            writeln!(
                self.out,
                " {year} {:6}  {}",
                record.citations, record.display.title
            )?;
        }
        Ok(())
    }

    fn list_distances(&mut self, id: usize) -> io::Result<()> {
        let clusters = &self.analysis.clusters;
        for other in clusters.clusters().iter().filter(|c| c.id != id) {
            let status = match self.session.decision(other.id) {
                Some(Decision::Accepted) => "selected",
                Some(Decision::Rejected) => "rejected",
                _ => "",
            };
            let distance = format_distance(Some(clusters.distance(id, other.id)));
            let line = format!(" group, distance ={:ROW_ID$} {distance} {status}", other.id);
            writeln!(self.out, "{}", line.trim_end())?;
        }
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        let accepted = self.session.accepted();
        let rejected = self.session.decisions.len() - accepted.len();
        writeln!(
            self.out,
            "\nAll groups decided: {} selected, {rejected} rejected",
            accepted.len()
        )?;
        if let Ok(selection) = self
            .session
            .export_selection(&self.analysis.clusters, &self.analysis.corpus)
        {
            write!(self.out, "{}", selection.summary.render())?;
        }
        Ok(())
    }
}
