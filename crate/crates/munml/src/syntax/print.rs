//! Canonical printers. `parse(print(f))` is structurally `f`; conjunctions
//! are parenthesized inside disjunctions, binders and mixed binary operands
//! get explicit parentheses, chains of one operator stay flat.

use super::{MuFormula, NmsoFormula};

pub fn print_mu(f: &MuFormula) -> String {
    let mut out = String::new();
    mu_formula(f, &mut out);
    out
}

fn mu_formula(f: &MuFormula, out: &mut String) {
    match f {
        MuFormula::Mu(v, b) => {
            out.push_str("mu ");
            out.push_str(v.name());
            out.push_str(". ");
            mu_formula(b, out);
        }
        MuFormula::Nu(v, b) => {
            out.push_str("nu ");
            out.push_str(v.name());
            out.push_str(". ");
            mu_formula(b, out);
        }
        MuFormula::Or(_, _) => mu_disj(f, out),
        MuFormula::And(_, _) => mu_conj(f, out),
        _ => mu_unary(f, out),
    }
}

fn mu_disj(f: &MuFormula, out: &mut String) {
    if let MuFormula::Or(l, r) = f {
        // flatten the left spine so chains print without parentheses
        if matches!(**l, MuFormula::Or(_, _)) {
            mu_disj(l, out);
        } else {
            mu_or_operand(l, out);
        }
        out.push_str(" \\/ ");
        mu_or_operand(r, out);
    } else {
        mu_or_operand(f, out);
    }
}

fn mu_or_operand(f: &MuFormula, out: &mut String) {
    match f {
        MuFormula::And(_, _) | MuFormula::Or(_, _) | MuFormula::Mu(_, _) | MuFormula::Nu(_, _) => {
            out.push('(');
            mu_formula(f, out);
            out.push(')');
        }
        _ => mu_unary(f, out),
    }
}

fn mu_conj(f: &MuFormula, out: &mut String) {
    if let MuFormula::And(l, r) = f {
        if matches!(**l, MuFormula::And(_, _)) {
            mu_conj(l, out);
        } else {
            mu_and_operand(l, out);
        }
        out.push_str(" /\\ ");
        mu_and_operand(r, out);
    } else {
        mu_and_operand(f, out);
    }
}

fn mu_and_operand(f: &MuFormula, out: &mut String) {
    match f {
        MuFormula::And(_, _) | MuFormula::Or(_, _) | MuFormula::Mu(_, _) | MuFormula::Nu(_, _) => {
            out.push('(');
            mu_formula(f, out);
            out.push(')');
        }
        _ => mu_unary(f, out),
    }
}

fn mu_unary(f: &MuFormula, out: &mut String) {
    match f {
        MuFormula::Box(a) => {
            out.push_str("[]");
            mu_unary(a, out);
        }
        MuFormula::Dia(a) => {
            out.push_str("<>");
            mu_unary(a, out);
        }
        MuFormula::GBox(a) => {
            out.push_str("[A]");
            mu_unary(a, out);
        }
        MuFormula::GDia(a) => {
            out.push_str("[E]");
            mu_unary(a, out);
        }
        MuFormula::Atom(v) => out.push_str(v.name()),
        MuFormula::NegAtom(v) => {
            out.push('~');
            out.push_str(v.name());
        }
        MuFormula::Top => out.push_str("true"),
        MuFormula::Bot => out.push_str("false"),
        MuFormula::And(_, _) | MuFormula::Or(_, _) | MuFormula::Mu(_, _) | MuFormula::Nu(_, _) => {
            out.push('(');
            mu_formula(f, out);
            out.push(')');
        }
    }
}

pub fn print_nmso(f: &NmsoFormula) -> String {
    let mut out = String::new();
    nmso_formula(f, &mut out);
    out
}

fn nmso_formula(f: &NmsoFormula, out: &mut String) {
    match f {
        NmsoFormula::Exists(v, b) => {
            out.push_str("exists ");
            out.push_str(v.name());
            out.push_str(". ");
            nmso_formula(b, out);
        }
        NmsoFormula::Forall(v, b) => {
            out.push_str("forall ");
            out.push_str(v.name());
            out.push_str(". ");
            nmso_formula(b, out);
        }
        NmsoFormula::Or(_, _) => nmso_disj(f, out),
        NmsoFormula::And(_, _) => nmso_conj(f, out),
        _ => nmso_neg(f, out),
    }
}

fn nmso_disj(f: &NmsoFormula, out: &mut String) {
    if let NmsoFormula::Or(l, r) = f {
        if matches!(**l, NmsoFormula::Or(_, _)) {
            nmso_disj(l, out);
        } else {
            nmso_operand(l, out);
        }
        out.push_str(" | ");
        nmso_operand(r, out);
    } else {
        nmso_operand(f, out);
    }
}

fn nmso_conj(f: &NmsoFormula, out: &mut String) {
    if let NmsoFormula::And(l, r) = f {
        if matches!(**l, NmsoFormula::And(_, _)) {
            nmso_conj(l, out);
        } else {
            nmso_operand(l, out);
        }
        out.push_str(" & ");
        nmso_operand(r, out);
    } else {
        nmso_operand(f, out);
    }
}

fn nmso_operand(f: &NmsoFormula, out: &mut String) {
    match f {
        NmsoFormula::And(_, _)
        | NmsoFormula::Or(_, _)
        | NmsoFormula::Exists(_, _)
        | NmsoFormula::Forall(_, _) => {
            out.push('(');
            nmso_formula(f, out);
            out.push(')');
        }
        _ => nmso_neg(f, out),
    }
}

fn nmso_neg(f: &NmsoFormula, out: &mut String) {
    match f {
        NmsoFormula::Not(a) => {
            out.push('~');
            nmso_neg(a, out);
        }
        NmsoFormula::Implies(l, r) => {
            out.push('(');
            nmso_formula(l, out);
            out.push_str(" -> ");
            nmso_formula(r, out);
            out.push(')');
        }
        NmsoFormula::Iff(l, r) => {
            out.push('(');
            nmso_formula(l, out);
            out.push_str(" <-> ");
            nmso_formula(r, out);
            out.push(')');
        }
        NmsoFormula::Sr(v) => {
            out.push_str("sr(");
            out.push_str(v.name());
            out.push(')');
        }
        NmsoFormula::Sing(v) => {
            out.push_str("sing(");
            out.push_str(v.name());
            out.push(')');
        }
        NmsoFormula::Empty(v) => {
            out.push_str("empty(");
            out.push_str(v.name());
            out.push(')');
        }
        NmsoFormula::Eqv(v, w) => {
            out.push_str("eqv(");
            out.push_str(v.name());
            out.push_str(", ");
            out.push_str(w.name());
            out.push(')');
        }
        NmsoFormula::BoxRel(v, w) => {
            out.push_str("box(");
            out.push_str(v.name());
            out.push_str(", ");
            out.push_str(w.name());
            out.push(')');
        }
        NmsoFormula::Sub(v, w) => {
            out.push_str(v.name());
            out.push_str(" <= ");
            out.push_str(w.name());
        }
        NmsoFormula::And(_, _)
        | NmsoFormula::Or(_, _)
        | NmsoFormula::Exists(_, _)
        | NmsoFormula::Forall(_, _) => {
            out.push('(');
            nmso_formula(f, out);
            out.push(')');
        }
    }
}
