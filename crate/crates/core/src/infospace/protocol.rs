use serde::{Deserialize, Serialize};

use super::space::{DropId, DropView, Event, Gesture, ShareTarget, Vec3};
use crate::error::{invalid_arg, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureKind {
    Grab,
    Move,
    Release,
    Throw,
    Show,
    Close,
    Share,
}

/// Client to server, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMsg {
    Hello {
        user: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        head: Option<Vec3>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gaze: Option<Vec3>,
    },
    Gesture {
        kind: GestureKind,
        drop: DropId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pos: Option<Vec3>,
        /// Share recipient: a user id or `"public"`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<String>,
    },
    Pose {
        head: Vec3,
        gaze: Vec3,
    },
}

impl ClientMsg {
    /// Builds the gesture of a `gesture` message.
    pub fn gesture(kind: GestureKind, drop: DropId, pos: Option<Vec3>, to: Option<&str>) -> Result<Gesture> {
        Ok(match kind {
            GestureKind::Grab => Gesture::Grab { drop },
            GestureKind::Move => Gesture::Move {
                drop,
                pos: pos.ok_or_else(|| invalid_arg("move needs pos"))?,
            },
            GestureKind::Release => Gesture::Release { drop },
            GestureKind::Throw => Gesture::Throw { drop },
            GestureKind::Show => Gesture::Show { drop },
            GestureKind::Close => Gesture::Close { drop },
            GestureKind::Share => Gesture::Share {
                drop,
                target: match to.ok_or_else(|| invalid_arg("share needs to"))? {
                    "public" => ShareTarget::Public,
                    user => ShareTarget::User(user.to_string()),
                },
            },
        })
    }
}

/// Server to client, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMsg {
    Snapshot { time: f64, drops: Vec<DropView> },
    Event { event: Event },
    Error { message: String },
}

impl ServerMsg {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("server messages serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_client_messages() {
        let m: ClientMsg = serde_json::from_str(r#"{"type":"hello","user":"a"}"#).unwrap();
        assert_eq!(m, ClientMsg::Hello { user: "a".into(), head: None, gaze: None });
        let m: ClientMsg =
            serde_json::from_str(r#"{"type":"gesture","kind":"move","drop":4,"pos":[1,0,1.2]}"#).unwrap();
        let ClientMsg::Gesture { kind, drop, pos, to } = m else { panic!() };
        assert_eq!(
            ClientMsg::gesture(kind, drop, pos, to.as_deref()).unwrap(),
            Gesture::Move { drop: 4, pos: [1.0, 0.0, 1.2] }
        );
        assert!(ClientMsg::gesture(GestureKind::Move, 1, None, None).is_err());
        assert_eq!(
            ClientMsg::gesture(GestureKind::Share, 1, None, Some("public")).unwrap(),
            Gesture::Share { drop: 1, target: ShareTarget::Public }
        );
        assert!(serde_json::from_str::<ClientMsg>(r#"{"type":"pose","head":[0,0,1]}"#).is_err());
        assert!(serde_json::from_str::<ClientMsg>(r#"{"type":"hello","user":"a","x":1}"#).is_err());
    }

    #[test]
    fn server_lines_are_single_json_objects() {
        let line = ServerMsg::Error { message: "nope".into() }.to_line();
        assert!(line.ends_with('\n') && line.matches('\n').count() == 1);
        let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(v["type"], "error");
    }
}
