package com.example.app;

import org.apache.log4j.net.JMSAppender;

public class QueueLogging {
    public JMSAppender build() {
        JMSAppender appender = new org.apache.log4j.net.JMSAppender();
        return appender;
    }
}
